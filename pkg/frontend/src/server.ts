// Static host for the console bundle.  Serves files, nothing else; all
// data the pages show comes from the passport node the browser talks to
// directly.

import express from "express";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));
const port = Number(process.env.CONSOLE_PORT ?? process.argv[2] ?? 8080);

export function createServer(): express.Express {
  const app = express();
  app.use(express.static(here));
  return app;
}

if (process.argv[1] && path.resolve(process.argv[1]) === fileURLToPath(import.meta.url)) {
  createServer().listen(port, () => {
    console.log(`console at http://127.0.0.1:${port}/index.html`);
  });
}

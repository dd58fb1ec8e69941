import fs from "node:fs";
import path from "node:path";
import { defineConfig } from "vitest/config";

// Source files import each other with .js specifiers so the compiled
// output runs in a browser untouched; map those back onto the .ts
// sources when vitest resolves them.
const tsSourceForJsSpecifier = {
  name: "ts-source-for-js-specifier",
  enforce: "pre" as const,
  resolveId(source: string, importer?: string) {
    if (importer && source.startsWith(".") && source.endsWith(".js")) {
      const candidate = path.resolve(path.dirname(importer), source.slice(0, -3) + ".ts");
      if (fs.existsSync(candidate)) return candidate;
    }
    return null;
  },
};

export default defineConfig({
  plugins: [tsSourceForJsSpecifier],
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 180_000,
  },
});

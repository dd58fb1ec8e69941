"""Named signing keys in one passphrase-encrypted file.

The CLI keeps its actors here: each entry maps a short name to a
secp256k1 secret.  The whole table is sealed as a single Fernet blob
under a PBKDF2-derived key, so the file reveals nothing but the salt and
iteration count.
"""

from __future__ import annotations

import base64
import json
import os

from cryptography.fernet import Fernet, InvalidToken as FernetInvalidToken
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.pbkdf2 import PBKDF2HMAC

from .crypto import KeyPair, keypair_from_secret
from .errors import InvalidKey, NotFound, Unauthorized

PBKDF2_ITERATIONS = 600_000


def _fernet(passphrase: str, salt: bytes, iterations: int) -> Fernet:
    kdf = PBKDF2HMAC(
        algorithm=hashes.SHA256(), length=32, salt=salt, iterations=iterations
    )
    return Fernet(base64.urlsafe_b64encode(kdf.derive(passphrase.encode("utf-8"))))


class Keystore:
    def __init__(self, path: str, passphrase: str):
        if not passphrase:
            raise InvalidKey("keystore passphrase must not be empty")
        self._path = path
        self._passphrase = passphrase
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as handle:
                envelope = json.load(handle)
            self._salt = bytes.fromhex(envelope["salt"])
            self._iterations = envelope["iterations"]
            try:
                plain = _fernet(passphrase, self._salt, self._iterations).decrypt(
                    envelope["vault"].encode("ascii")
                )
            except FernetInvalidToken as exc:
                raise Unauthorized("wrong keystore passphrase") from exc
            self._secrets: dict[str, int] = {
                name: int(value, 16) for name, value in json.loads(plain).items()
            }
        else:
            self._salt = os.urandom(16)
            # existing files keep whatever cost they were written with; the
            # env knob only affects newly created stores (tests dial it down)
            self._iterations = int(os.environ.get("VP_KEYSTORE_ITERS", PBKDF2_ITERATIONS))
            self._secrets = {}

    def _flush(self) -> None:
        plain = json.dumps(
            {name: format(secret, "064x") for name, secret in self._secrets.items()}
        ).encode("utf-8")
        vault = _fernet(self._passphrase, self._salt, self._iterations).encrypt(plain)
        envelope = {
            "salt": self._salt.hex(),
            "iterations": self._iterations,
            "vault": vault.decode("ascii"),
        }
        tmp = self._path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(envelope, handle)
        os.replace(tmp, self._path)

    def add(self, name: str, keypair: KeyPair, overwrite: bool = False) -> None:
        if name in self._secrets and not overwrite:
            raise InvalidKey(f"actor {name!r} already in the keystore")
        self._secrets[name] = keypair.secret
        self._flush()

    def get(self, name: str) -> KeyPair:
        if name not in self._secrets:
            raise NotFound(f"no actor {name!r} in the keystore")
        return keypair_from_secret(self._secrets[name])

    def names(self) -> list[str]:
        return sorted(self._secrets)

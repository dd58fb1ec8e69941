"""Error hierarchy shared by every layer.

Each error carries a stable machine-readable code and the HTTP status the
API gateway maps it to.  Contract-simulation errors reuse the revert
message strings of the contracts they mirror.
"""


class PassportError(Exception):
    code = "INTERNAL"
    http_status = 500
    default_message = "internal error"

    def __init__(self, message: str | None = None):
        super().__init__(message or self.default_message)

    @property
    def message(self) -> str:
        return self.args[0]


# --- crypto_core ----------------------------------------------------------

class InvalidSignature(PassportError):
    code = "INVALID_SIGNATURE"
    http_status = 401
    default_message = "signature is malformed or unrecoverable"


class WeakKey(PassportError):
    code = "WEAK_KEY"
    http_status = 400
    default_message = "MAC key must be at least 16 bytes"


class UnserializableValue(PassportError):
    code = "UNSERIALIZABLE_VALUE"
    http_status = 400
    default_message = "document cannot be canonically serialized"


# --- credential -----------------------------------------------------------

class InvalidVehicle(PassportError):
    code = "INVALID_VEHICLE"
    http_status = 400
    default_message = "vehicle row is missing required fields"


class InvalidKey(PassportError):
    code = "INVALID_KEY"
    http_status = 400
    default_message = "public key bytes must be non-empty"


# --- ledger_sim -----------------------------------------------------------

class AlreadyAnchored(PassportError):
    code = "ALREADY_ANCHORED"
    http_status = 409
    default_message = "Hash already anchored"


class AlreadyMinted(PassportError):
    code = "ALREADY_MINTED"
    http_status = 409
    default_message = "Vehicle already minted"


class Unauthorized(PassportError):
    code = "UNAUTHORIZED"
    http_status = 403
    default_message = "caller is not authorized for this operation"


class NoSuchToken(PassportError):
    code = "NO_SUCH_TOKEN"
    http_status = 404
    default_message = "token id has not been minted"


class WrongFrom(PassportError):
    code = "WRONG_FROM"
    http_status = 400
    default_message = "from address does not own the token"


class InvalidRecipient(PassportError):
    code = "INVALID_RECIPIENT"
    http_status = 400
    default_message = "transfer to the zero address is not allowed"


# --- passport_store -------------------------------------------------------

class NotFound(PassportError):
    code = "NOT_FOUND"
    http_status = 404
    default_message = "record not found"


class AlreadyRegistered(PassportError):
    code = "ALREADY_REGISTERED"
    http_status = 409
    default_message = "wallet is already registered"


class DuplicateVin(PassportError):
    code = "DUPLICATE_VIN"
    http_status = 409
    default_message = "vin is already registered"


# --- disclosure -----------------------------------------------------------

class FieldNotAllowed(PassportError):
    code = "FIELD_NOT_ALLOWED"
    http_status = 400
    default_message = "requested field is outside the disclosure whitelist"


class Expired(PassportError):
    code = "EXPIRED"
    http_status = 401
    default_message = "request or token has expired"


class InvalidState(PassportError):
    code = "INVALID_STATE"
    http_status = 409
    default_message = "record is not in the required state"


class InvalidToken(PassportError):
    code = "INVALID_TOKEN"
    http_status = 401
    default_message = "token is malformed or its MAC does not verify"


class Gone(PassportError):
    code = "GONE"
    http_status = 410
    default_message = "token has already been redeemed"


# --- service_log_flow -----------------------------------------------------

class BadSignature(PassportError):
    code = "BAD_SIGNATURE"
    http_status = 401
    default_message = "signature does not recover to the declared wallet"


class InvalidLog(PassportError):
    code = "INVALID_LOG"
    http_status = 400
    default_message = "service log description must be non-empty"


class DuplicateLogHash(PassportError):
    code = "DUPLICATE_LOG_HASH"
    http_status = 409
    default_message = "an identical service log is already pending or anchored"


# --- transfer_flow --------------------------------------------------------

class TransferAlreadyPending(PassportError):
    code = "TRANSFER_ALREADY_PENDING"
    http_status = 409
    default_message = "a transfer is already pending for this vehicle"


class StaleTimestamp(PassportError):
    code = "STALE_TIMESTAMP"
    http_status = 400
    default_message = "payload timestamp is outside the freshness window"


class WrongBuyer(PassportError):
    code = "WRONG_BUYER"
    http_status = 403
    default_message = "buyer wallet does not match the payload recipient"


class PayloadMismatch(PassportError):
    code = "PAYLOAD_MISMATCH"
    http_status = 409
    default_message = "payload does not match the pending transfer record"


# --- telemetry ------------------------------------------------------------

class BatchTooLarge(PassportError):
    code = "BATCH_TOO_LARGE"
    http_status = 400
    default_message = "telemetry batch exceeds 250 points"


class MacMismatch(PassportError):
    code = "UNAUTHORIZED_BATCH"
    http_status = 401
    default_message = "batch MAC does not verify"


# --- zk_threshold ---------------------------------------------------------

class Unsupported(PassportError):
    code = "UNSUPPORTED"
    http_status = 400
    default_message = "unsupported parameter choice"


class OutOfRange(PassportError):
    code = "OUT_OF_RANGE"
    http_status = 400
    default_message = "value does not fit the comparator width"


class PredicateNotSatisfied(PassportError):
    code = "PREDICATE_NOT_SATISFIED"
    http_status = 422
    default_message = "the claimed comparison does not hold for the witness"


class BadWitness(PassportError):
    code = "BAD_WITNESS"
    http_status = 400
    default_message = "witness does not open the commitment"


class MalformedProof(PassportError):
    code = "MALFORMED_PROOF"
    http_status = 400
    default_message = "proof bytes cannot be decoded"


# --- api_service ----------------------------------------------------------

class BadRequest(PassportError):
    code = "BAD_REQUEST"
    http_status = 400
    default_message = "request body is malformed"


class AuthRequired(PassportError):
    code = "AUTH_REQUIRED"
    http_status = 401
    default_message = "request signature or session token is missing or invalid"


class RoleMismatch(PassportError):
    code = "ROLE_MISMATCH"
    http_status = 403
    default_message = "authenticated principal lacks the required role"


class RateLimited(PassportError):
    code = "RATE_LIMITED"
    http_status = 429
    default_message = "per-wallet rate limit exceeded"

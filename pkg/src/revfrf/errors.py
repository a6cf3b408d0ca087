"""Exception hierarchy shared by every layer of the package."""


class RevfrfError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RevfrfError):
    """Bad user input: malformed config, dataset, request or parameters."""


class ProtocolError(RevfrfError):
    """A federated protocol could not run to completion (absent party,
    aborted session, message sent to an unregistered receiver...)."""


class KeyDomainError(RevfrfError):
    """A ciphertext was used with a key it is not encrypted under, or an
    operation was applied to the wrong domain kind (e.g. re-encrypting an
    already joint ciphertext)."""


class FixedPointRangeError(ValidationError):
    """A value falls outside the legal signed fixed-point ranges."""


class DecryptionError(RevfrfError):
    """Decryption produced a residue that is not a valid encoding.

    The final decryption step divides (x - 1) by the modulus and that
    division must be exact; inexactness means the ciphertext was refreshed,
    corrupted, or decrypted with the wrong key material.
    """


class KeygenError(RevfrfError):
    """Prime search exhausted its attempt budget."""

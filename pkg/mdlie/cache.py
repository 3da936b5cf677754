"""Content-addressed store for computed ranks, matrices and bases.

Each entry is a JSON file named by the SHA-256 of its canonical key. The
file records the key, the payload and a digest of the payload, so a
damaged entry is detected on read instead of being silently recomputed.

"""

from collections import Counter
import hashlib
import json
import logging
import os
import tempfile


log = logging.getLogger(__name__)


#: Environment variable overriding the cache directory
CACHE_ENV_VAR = "MDL_CACHE_DIR"

#: Cache directory used when neither a flag nor the environment names one
DEFAULT_CACHE_DIR = ".mdl-cache"

#: Folded into every key; bump when index ordering or matrix definitions change
CACHE_VERSION = "1"


class CacheCorruptError(Exception):
    pass


def canonical_json(data):
    """Serializes ``data`` with sorted keys and no insignificant whitespace"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def resolve_cache_dir(path=None):
    """Returns ``path`` if given, else ``$MDL_CACHE_DIR``, else the default"""
    if path:
        return path
    return os.environ.get(CACHE_ENV_VAR) or DEFAULT_CACHE_DIR


class ResultCache:
    """Persistent cache keyed by ``(kind, weight, depth, version)``

    :arg str path: directory holding the entries; created on first write

    :arg str version: code version folded into every key

    ``stats`` counts ``hit``, ``miss`` and ``write`` events.

    """

    def __init__(self, path=None, version=CACHE_VERSION):
        self.path = resolve_cache_dir(path)
        self.version = version
        self.stats = Counter()

    def __repr__(self):
        return f"<ResultCache {self.path!r} version={self.version!r}>"

    def key(self, kind, weight, depth):
        return {"kind": kind, "weight": weight, "depth": depth, "version": self.version}

    def entry_path(self, kind, weight, depth):
        digest = hashlib.sha256(
            canonical_json(self.key(kind, weight, depth)).encode("utf-8")
        ).hexdigest()
        return os.path.join(self.path, f"{digest}.json")

    def get(self, kind, weight, depth):
        """Returns the stored payload, or None on a miss

        :raises CacheCorruptError: if the entry cannot be read back intact

        """
        path = self.entry_path(kind, weight, depth)
        try:
            with open(path, encoding="utf-8") as fp:
                raw = fp.read()
        except FileNotFoundError:
            self.stats["miss"] += 1
            log.debug("cache miss %s %d,%d", kind, weight, depth)
            return None

        try:
            entry = json.loads(raw)
            payload = entry["payload"]
            digest = entry["digest"]
            stored_key = entry["key"]
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheCorruptError(f"cache entry {path} is unreadable: {exc}") from exc

        if stored_key != self.key(kind, weight, depth):
            raise CacheCorruptError(f"cache entry {path} holds key {stored_key}")
        actual = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
        if actual != digest:
            raise CacheCorruptError(f"cache entry {path} fails its digest check")

        self.stats["hit"] += 1
        log.debug("cache hit %s %d,%d", kind, weight, depth)
        return payload

    def put(self, kind, weight, depth, payload):
        """Stores ``payload``, replacing any previous entry atomically"""
        os.makedirs(self.path, exist_ok=True)
        entry = {
            "key": self.key(kind, weight, depth),
            "payload": payload,
            "digest": hashlib.sha256(
                canonical_json(payload).encode("utf-8")
            ).hexdigest(),
        }
        path = self.entry_path(kind, weight, depth)
        fd, tmp = tempfile.mkstemp(dir=self.path, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fp:
                fp.write(canonical_json(entry))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.stats["write"] += 1
        log.debug("cache write %s %d,%d", kind, weight, depth)

    def get_or_compute(self, kind, weight, depth, compute):
        """Returns the cached payload, computing and storing it on a miss"""
        payload = self.get(kind, weight, depth)
        if payload is None:
            payload = compute()
            self.put(kind, weight, depth, payload)
        return payload

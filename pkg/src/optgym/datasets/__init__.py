"""Benchmark dataset management: enumeration, local dirs, remote archives.

Datasets come in three flavors. Generator datasets enumerate seeds lazily
and are resolved inside the backend (no content crosses the wire).
Builtin suites also live backend-side. Local and downloaded datasets
carry file contents, which the client ships inline when a session starts.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import shutil
import tarfile
import tempfile
import time
import urllib.error
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from filelock import FileLock

from optgym.datasets.uri import BenchmarkUri
from optgym.errors import (
    ChecksumMismatchError,
    EmptyDirectoryError,
    NetworkFailureError,
    UnknownBenchmarkError,
    UnknownDatasetError,
    UnreadableFileError,
)

logger = logging.getLogger(__name__)

GENERATOR = "generator"

RECOGNIZED_EXTENSIONS = {
    ".tir": "tinyir-v0",
    ".c": "gcc-v0",
}


def cache_root() -> Path:
    root = os.environ.get("OPTGYM_CACHE")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "optgym"


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Dataset:
    """Base: a named, versioned collection of benchmarks."""

    def __init__(self, name: str, description: str = "", environments: tuple[str, ...] = ()):
        if "-v" not in name:
            raise ValueError(f"dataset name {name!r} must end in -v<int>")
        self.name = name
        self.description = description
        self.environments = environments

    @property
    def size(self):
        raise NotImplementedError

    @property
    def origin(self) -> str:
        raise NotImplementedError

    def benchmarks(self) -> Iterator[str]:
        """Deterministically ordered, lazily produced benchmark URIs."""
        raise NotImplementedError

    def inline_content(self, uri: BenchmarkUri) -> bytes | None:
        """File contents to ship to the backend; None if backend-resolved."""
        return None

    def content_digest(self, uri: BenchmarkUri) -> str:
        content = self.inline_content(uri)
        if content is None:
            return ""
        return hashlib.sha256(content).hexdigest()


class GeneratorDataset(Dataset):
    """Seeded program generator; 2**32 members enumerated lazily."""

    def __init__(self, name: str, description: str, environments: tuple[str, ...]):
        super().__init__(name, description, environments)

    @property
    def size(self):
        return GENERATOR

    @property
    def origin(self) -> str:
        return "generator"

    def benchmarks(self) -> Iterator[str]:
        for seed in itertools.count():
            if seed >= 2**32:
                return
            yield f"benchmark://{self.name}/seed-{seed}"


class FileDataset(Dataset):
    """Benchmarks backed by files; contents ship inline to the backend."""

    def __init__(self, name, description, environments, files: dict[str, Path], origin: str):
        super().__init__(name, description, environments)
        self._files = dict(files)
        self._origin = origin

    @property
    def size(self):
        return len(self._files)

    @property
    def origin(self) -> str:
        return self._origin

    def benchmarks(self) -> Iterator[str]:
        for rel in sorted(self._files):
            yield f"benchmark://{self.name}/{rel}"

    def add_files(self, files: dict[str, Path]) -> None:
        for rel, path in files.items():
            if rel in self._files and self._files[rel] != path:
                logger.warning("dataset %s: %s replaced by %s", self.name, rel, path)
            self._files[rel] = path

    def inline_content(self, uri: BenchmarkUri) -> bytes:
        path = self._files.get(uri.path)
        if path is None:
            raise UnknownBenchmarkError(str(uri))
        try:
            return path.read_bytes()
        except OSError as e:
            raise UnreadableFileError(f"{path}: {e}")


class BuiltinSuiteDataset(Dataset):
    """Backend-resident suite; enumerated from packaged data."""

    def __init__(self, name, description, environments, names: list[str]):
        super().__init__(name, description, environments)
        self._names = sorted(names)

    @property
    def size(self):
        return len(self._names)

    @property
    def origin(self) -> str:
        return "builtin-suite"

    def benchmarks(self) -> Iterator[str]:
        for n in self._names:
            yield f"benchmark://{self.name}/{n}"


@dataclass
class RemoteManifest:
    """One installable archive: where to get it and how to verify it."""

    name: str
    url: str
    sha256: str
    layout: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RemoteManifest":
        return cls(name=d["name"], url=d["url"], sha256=d["sha256"], layout=d.get("layout", {}))


class DatasetRegistry:
    def __init__(self):
        self._datasets: dict[str, Dataset] = {}
        self._manifests: dict[str, RemoteManifest] = {}
        self.download_count = 0

    def register(self, dataset: Dataset) -> Dataset:
        self._datasets[dataset.name] = dataset
        return dataset

    def register_manifest(self, manifest: RemoteManifest) -> None:
        self._manifests[manifest.name] = manifest

    def get(self, name: str) -> Dataset:
        try:
            return self._datasets[name]
        except KeyError:
            raise UnknownDatasetError(name)

    def list(self, environment: str | None = None) -> list[Dataset]:
        out = []
        for name in sorted(self._datasets):
            ds = self._datasets[name]
            if environment is None or not ds.environments or environment in ds.environments:
                out.append(ds)
        return out

    def benchmarks(self, dataset_name: str) -> Iterator[str]:
        return self.get(dataset_name).benchmarks()

    def inline_content(self, uri: str | BenchmarkUri) -> bytes | None:
        parsed = BenchmarkUri.parse(uri)
        ds = self._datasets.get(parsed.dataset)
        if ds is None:
            return None
        return ds.inline_content(parsed)

    def content_digest(self, uri: str | BenchmarkUri) -> str:
        parsed = BenchmarkUri.parse(uri)
        ds = self._datasets.get(parsed.dataset)
        if ds is None:
            return ""
        return ds.content_digest(parsed)

    # ------------------------------------------------------------------
    def _scan_directory(self, directory: Path) -> dict[str, Path]:
        files: dict[str, Path] = {}
        for path in sorted(directory.rglob("*")):
            if not path.is_file():
                continue
            if path.suffix in RECOGNIZED_EXTENSIONS:
                files[path.relative_to(directory).as_posix()] = path
            else:
                logger.warning("ignoring unrecognized file %s", path)
        return files

    def add_local_dataset(self, directory: str | Path, name: str = "user-v0") -> Dataset:
        directory = Path(directory)
        files = self._scan_directory(directory)
        if not files:
            raise EmptyDirectoryError(f"no recognized benchmark files under {directory}")
        environments = tuple(sorted({RECOGNIZED_EXTENSIONS[Path(r).suffix] for r in files}))
        existing = self._datasets.get(name)
        if isinstance(existing, FileDataset):
            existing.add_files(files)
            return existing
        ds = FileDataset(name, f"user files from {directory}", environments, files, "local-dir")
        return self.register(ds)

    def install_remote(self, name: str) -> Dataset:
        """Fetch, verify, and unpack a manifest-described archive.

        Installs are idempotent: when the store already holds the same
        sha256, no network request is made.
        """
        manifest = self._manifests.get(name)
        if manifest is None:
            raise UnknownDatasetError(f"no manifest for dataset {name!r}")
        store = cache_root() / "datasets" / name
        store.parent.mkdir(parents=True, exist_ok=True)
        with FileLock(str(store) + ".lock"):
            installed = store / "manifest.json"
            if installed.exists():
                recorded = json.loads(installed.read_text())
                if recorded.get("sha256") == manifest.sha256:
                    return self._register_installed(manifest, store)
                shutil.rmtree(store)
            self._download_and_unpack(manifest, store)
        return self._register_installed(manifest, store)

    def _download_and_unpack(self, manifest: RemoteManifest, store: Path) -> None:
        last_error = None
        for attempt in range(3):
            try:
                with tempfile.TemporaryDirectory() as tmp:
                    archive = Path(tmp) / "archive"
                    self.download_count += 1
                    with urllib.request.urlopen(manifest.url, timeout=60) as resp:
                        archive.write_bytes(resp.read())
                    digest = _sha256_file(archive)
                    if digest != manifest.sha256:
                        raise ChecksumMismatchError(
                            f"{manifest.name}: expected {manifest.sha256}, got {digest}"
                        )
                    target = Path(tmp) / "unpacked"
                    target.mkdir()
                    if tarfile.is_tarfile(archive):
                        with tarfile.open(archive) as tf:
                            tf.extractall(target, filter="data")
                    elif zipfile.is_zipfile(archive):
                        with zipfile.ZipFile(archive) as zf:
                            zf.extractall(target)
                    else:
                        raise ChecksumMismatchError(f"{manifest.name}: unrecognized archive format")
                    store.mkdir(parents=True, exist_ok=True)
                    for item in target.iterdir():
                        shutil.move(str(item), store / item.name)
                    (store / "manifest.json").write_text(
                        json.dumps(
                            {
                                "name": manifest.name,
                                "url": manifest.url,
                                "sha256": manifest.sha256,
                                "layout": manifest.layout,
                                "installed_at": time.time(),
                            },
                            indent=2,
                        )
                    )
                    return
            except ChecksumMismatchError:
                if store.exists():
                    shutil.rmtree(store)
                raise
            except (urllib.error.URLError, OSError, TimeoutError) as e:
                last_error = e
        raise NetworkFailureError(f"{manifest.name}: {last_error}")

    def _register_installed(self, manifest: RemoteManifest, store: Path) -> Dataset:
        files = self._scan_directory(store)
        environments = tuple(sorted({RECOGNIZED_EXTENSIONS[Path(r).suffix] for r in files}))
        ds = FileDataset(
            manifest.name, f"installed from {manifest.url}", environments, files, "remote-archive"
        )
        return self.register(ds)


def builtin_registry() -> DatasetRegistry:
    from optgym.tinyir.suite import suite_names

    registry = DatasetRegistry()
    registry.register(
        GeneratorDataset(
            "tinyir-gen-v0", "seeded random tinyir programs (20-200 instructions)", ("tinyir-v0",)
        )
    )
    registry.register(
        GeneratorDataset(
            "tinyir-stress-v0",
            "large seeded tinyir programs (20k-50k instructions) for performance testing",
            ("tinyir-v0",),
        )
    )
    registry.register(
        BuiltinSuiteDataset(
            "tinyir-suite-v0",
            "handwritten programs with exhaustive-search-known optima",
            ("tinyir-v0",),
            suite_names(),
        )
    )
    return registry


_default_registry: DatasetRegistry | None = None


def default_registry() -> DatasetRegistry:
    global _default_registry
    if _default_registry is None:
        _default_registry = builtin_registry()
    return _default_registry

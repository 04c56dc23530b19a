"""Dataset management: URIs, enumeration, local dirs, remote archives."""

import hashlib
import http.server
import io
import itertools
import tarfile
import threading

import pytest

from optgym.datasets import DatasetRegistry, RemoteManifest, builtin_registry
from optgym.datasets.uri import BenchmarkUri
from optgym.errors import ChecksumMismatchError, EmptyDirectoryError, UnknownDatasetError

TIR = ".inputs 1\nr0 = input 0\noutput r0\n"


class TestUri:
    def test_round_trip(self):
        for uri in (
            "benchmark://tinyir-gen-v0/seed-0",
            "benchmark://tinyir-suite-v0/dead-wide",
            "benchmark://user-v0/sub/dir/file.tir",
        ):
            assert str(BenchmarkUri.parse(uri)) == uri

    def test_rejects_malformed(self):
        for bad in ("benchmark://noversion/x", "http://a-v0/x", "benchmark://a-v0"):
            with pytest.raises(ValueError):
                BenchmarkUri.parse(bad)


class TestEnumeration:
    def test_generator_order(self):
        registry = builtin_registry()
        first = list(itertools.islice(registry.benchmarks("tinyir-gen-v0"), 3))
        assert first == [
            "benchmark://tinyir-gen-v0/seed-0",
            "benchmark://tinyir-gen-v0/seed-1",
            "benchmark://tinyir-gen-v0/seed-2",
        ]

    def test_suite_size(self):
        registry = builtin_registry()
        assert registry.get("tinyir-suite-v0").size >= 20

    def test_generator_enumeration_is_lazy(self):
        registry = builtin_registry()
        iterator = registry.benchmarks("tinyir-gen-v0")
        # Consuming a million URIs must not materialize a list.
        count = sum(1 for _ in itertools.islice(iterator, 1_000_000))
        assert count == 1_000_000
        assert registry.get("tinyir-gen-v0").size == "generator"

    def test_unknown_dataset(self):
        with pytest.raises(UnknownDatasetError):
            builtin_registry().benchmarks("nope-v0")

    def test_list_filters_by_environment(self):
        registry = builtin_registry()
        names = [d.name for d in registry.list("tinyir-v0")]
        assert "tinyir-gen-v0" in names and "tinyir-suite-v0" in names


class TestLocalDataset:
    def test_three_files_three_benchmarks(self, tmp_path):
        for name in ("a", "b", "c"):
            (tmp_path / f"{name}.tir").write_text(TIR)
        registry = DatasetRegistry()
        ds = registry.add_local_dataset(tmp_path)
        uris = list(ds.benchmarks())
        assert uris == [
            "benchmark://user-v0/a.tir",
            "benchmark://user-v0/b.tir",
            "benchmark://user-v0/c.tir",
        ]
        assert registry.inline_content(uris[0]) == TIR.encode()
        assert len(registry.content_digest(uris[0])) == 64

    def test_junk_files_ignored_with_warning(self, tmp_path, caplog):
        (tmp_path / "good.tir").write_text(TIR)
        (tmp_path / "junk.xyz").write_text("junk")
        with caplog.at_level("WARNING"):
            ds = DatasetRegistry().add_local_dataset(tmp_path)
        assert ds.size == 1
        assert any("junk.xyz" in r.message for r in caplog.records)

    def test_duplicate_basenames_get_distinct_uris(self, tmp_path):
        (tmp_path / "x").mkdir()
        (tmp_path / "y").mkdir()
        (tmp_path / "x" / "p.tir").write_text(TIR)
        (tmp_path / "y" / "p.tir").write_text(TIR)
        ds = DatasetRegistry().add_local_dataset(tmp_path)
        assert list(ds.benchmarks()) == [
            "benchmark://user-v0/x/p.tir",
            "benchmark://user-v0/y/p.tir",
        ]

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyDirectoryError):
            DatasetRegistry().add_local_dataset(tmp_path)


def make_archive() -> bytes:
    buffer = io.BytesIO()
    with tarfile.open(fileobj=buffer, mode="w:gz") as tar:
        for name in ("one.tir", "two.tir"):
            data = TIR.encode()
            info = tarfile.TarInfo(name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    return buffer.getvalue()


@pytest.fixture()
def archive_server():
    archive = make_archive()

    class Handler(http.server.BaseHTTPRequestHandler):
        requests_served = [0]

        def do_GET(self):
            Handler.requests_served[0] += 1
            body = archive if self.path == "/good.tar.gz" else b"corrupted" + archive
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = http.server.HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", hashlib.sha256(archive).hexdigest(), Handler
    server.shutdown()


class TestRemoteInstall:
    def test_install_verify_enumerate(self, archive_server, tmp_path, monkeypatch):
        monkeypatch.setenv("OPTGYM_CACHE", str(tmp_path))
        base, sha, handler = archive_server
        registry = DatasetRegistry()
        registry.register_manifest(
            RemoteManifest(name="remote-v0", url=f"{base}/good.tar.gz", sha256=sha)
        )
        ds = registry.install_remote("remote-v0")
        assert ds.origin == "remote-archive"
        assert list(ds.benchmarks()) == [
            "benchmark://remote-v0/one.tir",
            "benchmark://remote-v0/two.tir",
        ]

    def test_second_install_makes_no_requests(self, archive_server, tmp_path, monkeypatch):
        monkeypatch.setenv("OPTGYM_CACHE", str(tmp_path))
        base, sha, handler = archive_server
        registry = DatasetRegistry()
        registry.register_manifest(
            RemoteManifest(name="remote-v0", url=f"{base}/good.tar.gz", sha256=sha)
        )
        registry.install_remote("remote-v0")
        served_before = handler.requests_served[0]
        downloads_before = registry.download_count
        registry.install_remote("remote-v0")
        assert handler.requests_served[0] == served_before
        assert registry.download_count == downloads_before

    def test_checksum_mismatch_leaves_clean_store(self, archive_server, tmp_path, monkeypatch):
        monkeypatch.setenv("OPTGYM_CACHE", str(tmp_path))
        base, sha, handler = archive_server
        registry = DatasetRegistry()
        registry.register_manifest(
            RemoteManifest(name="bad-v0", url=f"{base}/corrupt.tar.gz", sha256=sha)
        )
        with pytest.raises(ChecksumMismatchError):
            registry.install_remote("bad-v0")
        assert not (tmp_path / "datasets" / "bad-v0").exists()

    def test_missing_manifest(self):
        with pytest.raises(UnknownDatasetError):
            DatasetRegistry().install_remote("nowhere-v0")

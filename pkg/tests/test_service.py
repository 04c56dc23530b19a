"""Service runtime tests: lifecycle, caching, fault tolerance, protocol totality."""

import statistics
import sys
import time

import pytest

from optgym.errors import (
    BackendCrashError,
    OptGymError,
    OutOfRangeActionError,
    SessionCapExceededError,
    SessionNotFoundError,
    SpawnFailureError,
    UnknownBenchmarkError,
)
from optgym.service import ServiceConfig, shutdown_all_services, start_service

SEED1 = "benchmark://tinyir-gen-v0/seed-1"


@pytest.fixture(scope="module")
def svc():
    handle = start_service("tinyir")
    yield handle
    handle.release()


def test_get_spaces_lists_declared_spaces(svc):
    spaces = svc.spaces()
    assert len(spaces["action_spaces"]) == 1
    assert spaces["action_spaces"][0]["n"] == 6
    assert len(spaces["observation_spaces"]) >= 3


def test_start_service_reuses_running_service(svc):
    again = start_service("tinyir")
    try:
        assert again is svc
        assert again.refs >= 2
    finally:
        again.release()


def test_spawn_failure_on_corrupt_executable():
    with pytest.raises(SpawnFailureError):
        start_service("tinyir", argv=["/no/such/binary", "tinyir", "--port=0"])
    with pytest.raises(SpawnFailureError):
        start_service("tinyir", argv=[sys.executable, "-m", "optgym.service.run", "nope"])


def test_unknown_benchmark(svc):
    with pytest.raises(UnknownBenchmarkError):
        svc.client.start_session("benchmark://missing-v0/x")


def test_cache_hit_on_second_start_session(svc):
    svc.client.clear_cache()
    first = svc.client.start_session(SEED1, observation_space_ids=["InstCount"])
    before = svc.client.stats()["cache"]
    second = svc.client.start_session(SEED1, observation_space_ids=["InstCount"])
    after = svc.client.stats()["cache"]
    assert after["hits"] == before["hits"] + 1
    # Cache soundness: first observation identical for hit and miss sessions.
    assert first["observations"] == second["observations"]
    svc.client.end_session(first["session_id"])
    svc.client.end_session(second["session_id"])


def test_step_is_one_round_trip_regardless_of_batch(svc):
    session = svc.client.start_session(SEED1)["session_id"]
    before = svc.client.round_trips
    svc.client.step(session, list(range(6)) + [0, 1, 2, 3], ["InstCount"])
    assert svc.client.round_trips == before + 1
    svc.client.end_session(session)


def test_step_after_end_session(svc):
    session = svc.client.start_session(SEED1)["session_id"]
    svc.client.end_session(session)
    with pytest.raises(SessionNotFoundError):
        svc.client.step(session, [0], [])


def test_out_of_range_action(svc):
    session = svc.client.start_session(SEED1)["session_id"]
    with pytest.raises(OutOfRangeActionError):
        svc.client.step(session, [99], [])
    svc.client.end_session(session)


def test_session_cap():
    config = ServiceConfig(session_cap=4)
    handle = start_service("tinyir", config=config, reuse=False)
    try:
        sessions = [handle.client.start_session(SEED1)["session_id"] for _ in range(4)]
        with pytest.raises(SessionCapExceededError):
            handle.client.start_session(SEED1)
        # fork counts against the same cap
        handle.client.end_session(sessions[-1])
        handle.client.fork(sessions[0])
        with pytest.raises(SessionCapExceededError):
            handle.client.fork(sessions[0])
    finally:
        handle.shutdown()


def test_fork_independence(svc):
    parent = svc.client.start_session(SEED1, observation_space_ids=["StateDigest"])
    child_id = svc.client.fork(parent["session_id"])
    child_digest = svc.client.step(child_id, [], ["StateDigest"])["observations"][0]
    assert child_digest == parent["observations"][0]
    # stepping the parent leaves the child untouched
    svc.client.step(parent["session_id"], [1], [])
    after = svc.client.step(child_id, [], ["StateDigest"])["observations"][0]
    assert after == child_digest
    # fork survives parent teardown
    svc.client.end_session(parent["session_id"])
    svc.client.step(child_id, [1], ["InstCount"])
    svc.client.end_session(child_id)


def test_fork_dead_session(svc):
    session = svc.client.start_session(SEED1)["session_id"]
    svc.client.end_session(session)
    with pytest.raises(SessionNotFoundError):
        svc.client.fork(session)


def test_protocol_totality_unknown_session(svc):
    for call in (
        lambda: svc.client.step(999999, [0], []),
        lambda: svc.client.fork(999999),
    ):
        with pytest.raises(SessionNotFoundError):
            call()
    # EndSession on an unknown id is an acknowledged no-op.
    svc.client.end_session(999999)


def test_backend_killed_mid_call_recovers():
    handle = start_service("tinyir", reuse=False)
    try:
        session = handle.client.start_session(SEED1)["session_id"]
        handle.client.step(session, [0], [])
        handle.client.inject_crash()
        # The session died with the process; the supervisor restarts on use.
        with pytest.raises((SessionNotFoundError, BackendCrashError)):
            handle.client.step(session, [0], [])
        fresh = handle.client.start_session(SEED1, observation_space_ids=["InstCount"])
        assert fresh["observations"][0] > 0
        assert handle.supervisor.restart_count >= 1
    finally:
        handle.shutdown()


def test_fork_cost_independent_of_history_length():
    handle = start_service("tinyir", reuse=False)
    try:
        short = handle.client.start_session(SEED1)["session_id"]
        handle.client.step(short, [0], [])
        long = handle.client.start_session(SEED1)["session_id"]
        for _ in range(10):
            handle.client.step(long, [0, 1, 2, 3, 4, 5] * 17, [])  # ~1000 actions total

        def median_fork_time(session_id):
            times = []
            for _ in range(30):
                t0 = time.perf_counter()
                child = handle.client.fork(session_id)
                times.append(time.perf_counter() - t0)
                handle.client.end_session(child)
            return statistics.median(times)

        t_short = median_fork_time(short)
        t_long = median_fork_time(long)
        assert t_long <= 2 * t_short + 1e-3
    finally:
        handle.shutdown()


def test_typed_error_codes_cross_the_wire(svc):
    try:
        svc.client.start_session("benchmark://missing-v0/x")
    except OptGymError as e:
        assert e.code == "unknown-benchmark"
    else:
        pytest.fail("expected an error")


def teardown_module(module):
    shutdown_all_services()

"""Extract the optimization space from GCC's help output.

The space is parsed from ``--help=optimizers -Q`` and ``--help=params -Q``
of whichever compiler the specifier names. Specifiers:

* a local executable name or path ("gcc", "/usr/bin/gcc-11"),
* ``docker:<image>`` to run the compiler through the host container
  runtime, or
* ``fixture://<name>`` to load verbatim captured help text checked into
  the package (no compiler needed).
"""

from __future__ import annotations

import re
import subprocess
from importlib import resources

from optgym.errors import CompilerNotFoundError, HelpParseEmptyError
from optgym.gcc.options import FLAG, O_LEVEL, PARAM, UNBOUNDED_HI, UNBOUNDED_LO, GccSpec, Option

FIXTURE_SCHEME = "fixture://"
DOCKER_SCHEME = "docker:"

# "-Og tunes for debugging, not an optimization objective; it is not part
# of the space." (Same for the historic -O4+ aliases.)
_SKIPPED_LEVELS = {"-Og"}
_LEVEL_ORDER = ["-O0", "-O1", "-O2", "-O3", "-Ofast", "-Os", "-Oz"]

_RANGE_RE = re.compile(r"^<(-?\d+),(-?\d+)>$")
_ENUM_RE = re.compile(r"^\[([^\]]+)\]$")


def compiler_argv(specifier: str, workdir: str | None = None) -> list[str]:
    """Base argv for invoking the specified compiler."""
    if specifier.startswith(DOCKER_SCHEME):
        image = specifier[len(DOCKER_SCHEME) :]
        argv = ["docker", "run", "--rm"]
        if workdir:
            argv += ["-v", f"{workdir}:/w", "-w", "/w"]
        return argv + [image, "gcc"]
    return [specifier]


def _run_help(specifier: str, args: list[str]) -> str:
    argv = compiler_argv(specifier) + args
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=60)
    except FileNotFoundError:
        raise CompilerNotFoundError(specifier)
    except subprocess.TimeoutExpired:
        raise CompilerNotFoundError(f"{specifier}: help query timed out")
    if proc.returncode != 0:
        raise CompilerNotFoundError(f"{specifier}: {' '.join(args)} failed: {proc.stderr[:200]}")
    return proc.stdout


def _fixture_text(name: str, filename: str) -> str:
    path = resources.files("optgym.gcc") / "fixtures" / name / filename
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CompilerNotFoundError(f"no fixture named {name!r}")


def read_help_texts(specifier: str) -> tuple[str, str, str]:
    """(version line, optimizers help, params help) for a specifier."""
    if specifier.startswith(FIXTURE_SCHEME):
        name = specifier[len(FIXTURE_SCHEME) :]
        return (
            _fixture_text(name, "version.txt").splitlines()[0],
            _fixture_text(name, "optimizers.txt"),
            _fixture_text(name, "params.txt"),
        )
    version = _run_help(specifier, ["--version"]).splitlines()[0]
    optimizers = _run_help(specifier, ["--help=optimizers", "-Q"])
    params = _run_help(specifier, ["--help=params", "-Q"])
    return version, optimizers, params


def _split_help_line(line: str) -> tuple[str, str] | None:
    """(token, remainder) for an option line; None for prose/blank lines."""
    if not line.startswith("  ") or line.startswith("   "):
        return None
    stripped = line.strip()
    if not stripped.startswith("-"):
        return None
    parts = stripped.split(None, 1)
    return parts[0], (parts[1].strip() if len(parts) > 1 else "")


def _parse_argument(argument: str) -> dict:
    """Classify the text following '=' in a help token."""
    if not argument:
        return {"lo": UNBOUNDED_LO, "hi": UNBOUNDED_HI}
    m = _RANGE_RE.match(argument)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return {"lo": min(lo, hi), "hi": max(lo, hi)}
    m = _ENUM_RE.match(argument)
    if m:
        return {"values": tuple(v.strip() for v in m.group(1).split("|"))}
    # things like "<number>" or free-form hints: an unbounded integer
    return {"lo": UNBOUNDED_LO, "hi": UNBOUNDED_HI}


def parse_optimizers_help(text: str) -> tuple[list[str], dict[str, dict]]:
    """Returns (o-levels present, flag name -> raw attributes)."""
    levels: set[str] = set()
    flags: dict[str, dict] = {}
    for line in text.splitlines():
        split = _split_help_line(line)
        if split is None:
            continue
        token, _ = split
        if token.startswith("-O"):
            if token == "-O<number>":
                levels.update(["-O0", "-O1", "-O2", "-O3"])
            elif token in _LEVEL_ORDER and token not in _SKIPPED_LEVELS:
                levels.add(token)
            continue
        if not token.startswith("-f"):
            continue
        name, eq, argument = token.partition("=")
        entry = flags.setdefault(name, {"bare": False, "arg": None})
        if not eq:
            entry["bare"] = True
        else:
            entry["arg"] = _parse_argument(argument)
    ordered_levels = [lv for lv in _LEVEL_ORDER if lv in levels]
    return ordered_levels, flags


def parse_params_help(text: str) -> dict[str, dict]:
    params: dict[str, dict] = {}
    for line in text.splitlines():
        split = _split_help_line(line)
        if split is None:
            continue
        token, remainder = split
        if not token.startswith("--param="):
            continue
        body = token[len("--param=") :]
        name, _, argument = body.partition("=")
        if not name:
            continue
        attrs = _parse_argument(argument)
        if "values" not in attrs and argument == "" and remainder and not _is_number(remainder.split()[0]):
            # No range and a non-numeric default: an enumerated param whose
            # choices the help text does not list; keep the default value.
            attrs = {"values": (remainder.split()[0],)}
        params[name] = attrs
    return params


def _is_number(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


def build_spec(specifier: str, version: str, optimizers_text: str, params_text: str) -> GccSpec:
    levels, flags = parse_optimizers_help(optimizers_text)
    params = parse_params_help(params_text)
    options: list[Option] = []
    if levels:
        options.append(Option(name="-O", kind=O_LEVEL, values=tuple(levels)))
    for name in sorted(flags):
        attrs = flags[name]
        arg = attrs["arg"]
        options.append(
            Option(
                name=name,
                kind=FLAG,
                bare=attrs["bare"],
                negatable=attrs["bare"],  # bare -f flags accept -fno- forms
                values=tuple(arg.get("values", ())) if arg else (),
                lo=arg.get("lo") if arg else None,
                hi=arg.get("hi") if arg else None,
            )
        )
    for name in sorted(params):
        attrs = params[name]
        options.append(
            Option(
                name=name,
                kind=PARAM,
                values=tuple(attrs.get("values", ())),
                lo=attrs.get("lo"),
                hi=attrs.get("hi"),
            )
        )
    if not options:
        raise HelpParseEmptyError(f"{specifier}: no options extracted")
    return GccSpec(compiler=specifier, version=version, options=tuple(options))


def extract_space(specifier: str) -> GccSpec:
    version, optimizers_text, params_text = read_help_texts(specifier)
    return build_spec(specifier, version, optimizers_text, params_text)

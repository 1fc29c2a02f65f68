"""Batch entry point: ``python -m reduction <command> ...``.

Every command is a Django management command of this app; this module only
maps the hyphenated names and turns the exit status into a return code.
"""
from __future__ import annotations

import os
import sys

from django.core.management import ManagementUtility

COMMANDS = (
    "validate",
    "encode",
    "solve",
    "count",
    "accept",
    "oracle",
    "witness",
    "gen-hard",
    "find-kexpr",
)
USAGE_ERROR = 2


def usage() -> str:
    return "usage: cwsat {" + ",".join(COMMANDS) + "} [options]\n"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "cwsat.settings")
    if not argv or argv[0] not in COMMANDS:
        if argv:
            sys.stderr.write(f"unknown command {argv[0]!r}\n")
        sys.stderr.write(usage())
        return USAGE_ERROR
    name = argv[0].replace("-", "_")
    try:
        ManagementUtility(["cwsat", name, *argv[1:]]).execute()
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0

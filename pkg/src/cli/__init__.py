"""Command-line front end."""

from .commands import COMMANDS, CommandResult, cmd_bench, cmd_inis, cmd_screen, cmd_simulate, run_command
from .parser import build_parser, parse_args
from .report import envelope, to_plain, write_csv_table, write_json_report

__all__ = [
    "COMMANDS",
    "CommandResult",
    "build_parser",
    "cmd_bench",
    "cmd_inis",
    "cmd_screen",
    "cmd_simulate",
    "envelope",
    "parse_args",
    "run_command",
    "to_plain",
    "write_csv_table",
    "write_json_report",
]

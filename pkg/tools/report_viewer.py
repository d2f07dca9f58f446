#!/usr/bin/env python3
import argparse
import io
import json
import os
import sys
from typing import Optional
import zstandard as zstd
from rich.console import Console
from rich.syntax import Syntax
from rich.prompt import Prompt
from rich.panel import Panel
from rich.table import Table

STATUS_STYLE = {'pass': 'green', 'fail': 'bold red', 'skipped': 'yellow'}

def load_report(filepath: str) -> dict:
    """Plain JSON, or zstd-compressed when the name ends in .zst."""
    if not filepath.endswith('.zst'):
        with open(filepath) as fh:
            return json.load(fh)
    with open(filepath, 'rb') as fh:
        reader = zstd.ZstdDecompressor().stream_reader(fh)
        return json.load(io.TextIOWrapper(reader, encoding='utf-8'))

def collect_checks(report: dict) -> list[tuple[str, dict]]:
    """(section path, check) for every check record, in report order."""
    out = []

    def walk(node, path):
        if isinstance(node, dict):
            if 'status' in node and 'name' in node:
                out.append((path, node))
                return
            for key in node:
                walk(node[key], f'{path}/{key}' if path else key)
        elif isinstance(node, list):
            for item in node:
                walk(item, path)

    walk(report, '')
    return out

class ReportViewer:
    def __init__(self, filepath: str):
        self.filepath = filepath
        self.console = Console()
        self.report = load_report(filepath)
        self.checks = collect_checks(self.report)
        self.current_position = 0
        self.only_failures = False

    def visible(self) -> list[tuple[str, dict]]:
        if self.only_failures:
            return [c for c in self.checks if c[1]['status'] == 'fail']
        return self.checks

    def display_summary(self):
        table = Table(title=f"{os.path.basename(self.filepath)}  ({self.report.get('command', 'report')})")
        table.add_column("#", justify="right")
        table.add_column("Section")
        table.add_column("Check")
        table.add_column("Status")
        table.add_column("Provenance")
        for k, (path, c) in enumerate(self.visible()):
            style = STATUS_STYLE.get(c['status'], '')
            marker = '>' if k == self.current_position else ''
            table.add_row(f"{marker}{k}", path, c['name'], f"[{style}]{c['status']}[/{style}]", c['provenance'])
        self.console.print(table)
        counts = {s: sum(1 for _, c in self.checks if c['status'] == s) for s in STATUS_STYLE}
        self.console.print(f"pass {counts['pass']}  fail {counts['fail']}  skipped {counts['skipped']}")

    def display_check(self, position: int):
        checks = self.visible()
        if not 0 <= position < len(checks):
            self.console.print("[red]No such check[/red]")
            return
        path, c = checks[position]
        syntax = Syntax(json.dumps(c, indent=2, sort_keys=True), "json", theme="monokai")
        self.console.print(Panel(syntax, title=f"{path} / {c['name']}"))

    def display_config(self):
        config = self.report.get('config') or self.report.get('options') or {}
        table = Table(title="Configuration")
        table.add_column("Key")
        table.add_column("Value")
        for key in sorted(config):
            table.add_row(key, str(config[key]))
        self.console.print(table)

    def search(self, query: str) -> Optional[int]:
        for k, (path, c) in enumerate(self.visible()):
            if query.lower() in f"{path} {c['name']}".lower():
                return k
        return None

    def run(self):
        while True:
            self.console.clear()
            self.display_summary()
            if self.visible():
                self.display_check(self.current_position)
            command = Prompt.ask("\nCommands", choices=["n", "p", "j", "f", "c", "s", "q"], default="n")
            if command == "n":
                self.current_position = min(len(self.visible()) - 1, self.current_position + 1)
            elif command == "p":
                self.current_position = max(0, self.current_position - 1)
            elif command == "j":
                try:
                    self.current_position = max(0, int(Prompt.ask("Jump to check")))
                except ValueError:
                    self.console.print("[red]Invalid position[/red]")
            elif command == "f":
                self.only_failures = not self.only_failures
                self.current_position = 0
            elif command == "c":
                self.display_config()
                Prompt.ask("Press enter", default="")
            elif command == "s":
                found = self.search(Prompt.ask("Enter search term"))
                if found is None:
                    self.console.print("[yellow]No matching check[/yellow]")
                    Prompt.ask("Press enter", default="")
                else:
                    self.current_position = found
            elif command == "q":
                break


def main():
    parser = argparse.ArgumentParser(description="Browse the checks of a verification report")
    parser.add_argument("file", help="Path to a .json or .json.zst report")
    parser.add_argument("--summary", action="store_true", help="print the table once and exit")
    args = parser.parse_args()

    if not os.path.exists(args.file):
        print(f"Error: File '{args.file}' not found")
        sys.exit(1)

    viewer = ReportViewer(args.file)
    if args.summary:
        viewer.display_summary()
        sys.exit(0 if all(c['status'] != 'fail' for _, c in viewer.checks) else 1)
    viewer.run()


if __name__ == "__main__":
    main()

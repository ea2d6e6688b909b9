"""Render a figure from a JSON description: python -m rabiplots --spec fig.json"""
from __future__ import annotations

import argparse
import sys

from .readers import SchemaError
from .render import render
from .spec import load_figure_spec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="rabiplots",
        description="Render rabispec CSV/JSON outputs into figures")
    ap.add_argument("--spec", required=True,
                    help="JSON figure description (kind, inputs, output)")
    args = ap.parse_args(argv)
    try:
        fs = load_figure_spec(args.spec)
        render(fs)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(fs.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Rewrite the expected record streams: python3 tests/golden/regen.py (from the repository root)."""
import contextlib
import io
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from cases import CASES  # noqa: E402

from depchar.cli import main  # noqa: E402

out_dir = Path(__file__).parent / "expected"
out_dir.mkdir(exist_ok=True)
for name, argv in CASES.items():
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv + ["--format", "records"])
    (out_dir / f"{name}.jsonl").write_text(f"# exit {code}\n" + buf.getvalue())
    print(name, code)

"""
The command-line pipeline
=========================

``bclab generate`` writes a profile CSV and a manifest, ``bclab verify``
rebuilds the surface from them and writes report.json/report.csv, and
``bclab report`` prints a table.  The exit code tells CI what happened.
"""

import tempfile
from pathlib import Path

from bclab.cli import main

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "rot"
    main(["generate", "--family", "rotational", "--p", "2", "--q", "2",
          "--initial", "1", "1.3", "0.7853981633974483", "--obj", "--out", str(out)])
    print(sorted(p.name for p in out.iterdir()))

    code = main(["verify", "--manifest", str(out / "manifest.json"), "--out", str(out)])
    print("verify exit code:", code)
    main(["report", "--input", str(out / "report.json")])

    # an invalid request is rejected with exit code 2 and a JSON error on stderr
    print("p = 0 exit code:", main(["generate", "--family", "rotational", "--p", "0", "--out", str(out)]))

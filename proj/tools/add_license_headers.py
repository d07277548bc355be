#!/usr/bin/env python3
"""Prepends the Apache-2.0 header to every source file that lacks it.

Usage: tools/add_license_headers.py [repo-root]
"""

import os
import sys

PROJECT = "MLPod Sandbox"
COPYRIGHT = "Copyright 2026 The MLPod Sandbox Authors"
LICENSE = [
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]
SOURCE_DIRS = ["src", "include", "tests", "tools"]
C_STYLE = (".cpp", ".hpp", ".h")
HASH_STYLE = (".py", ".sh", ".cmake")


def body_lines(name):
    return [name, "", "This source file is part of the %s open source project" % PROJECT, "", COPYRIGHT, ""] + LICENSE


def c_header(name):
    lines = ["/*"] + [(" * " + l).rstrip() for l in body_lines(name)] + [" */", ""]
    return "\n".join(lines) + "\n"


def hash_header(name):
    return "\n".join(("# " + l).rstrip() for l in body_lines(name)) + "\n\n"


def wanted(path):
    base = os.path.basename(path)
    return base == "CMakeLists.txt" or base.endswith(C_STYLE) or base.endswith(HASH_STYLE)


def apply(path):
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if COPYRIGHT in text[:1200]:
        return False
    name = os.path.basename(path)
    if name.endswith(C_STYLE):
        text = c_header(name) + text
    else:
        shebang = ""
        if text.startswith("#!"):
            shebang, _, text = text.partition("\n")
            shebang += "\n"
        text = shebang + hash_header(name) + text
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return True


def main():
    root = os.path.abspath(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), ".."))
    paths = [os.path.join(root, "CMakeLists.txt")]
    for d in SOURCE_DIRS:
        for dirpath, _, files in os.walk(os.path.join(root, d)):
            paths += [os.path.join(dirpath, f) for f in sorted(files)]
    changed = [p for p in sorted(paths) if os.path.isfile(p) and wanted(p) and apply(p)]
    for p in changed:
        print(os.path.relpath(p, root))
    print("%d file(s) updated" % len(changed), file=sys.stderr)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Copyright 2026 The cvclean Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates include/cvclean/unicode_tables.hpp from Python's unicodedata."""
import sys
import unicodedata

HEADER = """// Copyright 2026 The cvclean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generated by scripts/gen_unicode_tables.py (Unicode {version}). Do not edit.

#pragma once

#include <array>
#include <cstdint>

namespace cvclean::unicode::detail {{

struct CodepointRange {{
  char32_t first;
  char32_t last;
}};

// Code points whose general category is P* or S*.
inline constexpr std::array<CodepointRange, {n}> kPunctuationOrSymbol{{{{
{rows}
}}}};

}}  // namespace cvclean::unicode::detail
"""


def main():
    ranges = []
    start = None
    prev = None
    for cp in range(0x110000):
        cat = unicodedata.category(chr(cp))
        hit = cat[0] in "PS"
        if hit and start is None:
            start = cp
        if not hit and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, 0x10FFFF))
    rows = "\n".join(f"    {{0x{a:04X}, 0x{b:04X}}}," for a, b in ranges)
    sys.stdout.write(HEADER.format(version=unicodedata.unidata_version,
                                   n=len(ranges), rows=rows))


if __name__ == "__main__":
    main()

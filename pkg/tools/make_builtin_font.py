"""Regenerate src/odm/_fontdata.py from DejaVu Sans Mono.

Run once; the output is committed so the package never needs a font file.

    python tools/make_builtin_font.py /usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf
"""
import sys

import numpy as np
from PIL import Image, ImageDraw, ImageFont

PX = 20
CELL_W = 12


def main(path, out="src/odm/_fontdata.py"):
    font = ImageFont.truetype(path, PX)
    ascent, descent = font.getmetrics()
    chars = [chr(c) for c in range(0x20, 0x7F)]
    bitmaps = {}
    for ch in chars:
        img = Image.new("L", (CELL_W, ascent + descent), 0)
        ImageDraw.Draw(img).text((0, 0), ch, fill=255, font=font)
        bitmaps[ch] = np.asarray(img) >= 128

    # crop the shared vertical band that any glyph actually uses
    rows = np.stack(list(bitmaps.values())).any(axis=(0, 2))
    top, bottom = np.flatnonzero(rows)[[0, -1]]
    height = bottom - top + 1

    lines = [
        '"""Built-in monospace bitmap font (printable ASCII).',
        "",
        "Derived from DejaVu Sans Mono (Bitstream Vera license) by",
        "tools/make_builtin_font.py. Each glyph is HEIGHT rows of WIDTH-bit",
        'integers, most significant bit leftmost."""',
        "",
        f"WIDTH = {CELL_W}",
        f"HEIGHT = {height}",
        "",
        "GLYPHS = {",
    ]
    for ch in chars:
        bm = bitmaps[ch][top:bottom + 1]
        words = []
        for row in bm:
            v = 0
            for bit in row:
                v = (v << 1) | int(bit)
            words.append(f"0x{v:03x}")
        lines.append(f"    {ch!r}: ({', '.join(words)}),")
    lines.append("}")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:])

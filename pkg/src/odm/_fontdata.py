"""Built-in monospace bitmap font (printable ASCII).

Derived from DejaVu Sans Mono (Bitstream Vera license) by
tools/make_builtin_font.py. Each glyph is HEIGHT rows of WIDTH-bit
integers, most significant bit leftmost."""

WIDTH = 12
HEIGHT = 21

GLYPHS = {
    ' ': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '!': (0x000, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    '"': (0x000, 0x198, 0x198, 0x198, 0x198, 0x198, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '#': (0x000, 0x066, 0x044, 0x0cc, 0x0cc, 0x7ff, 0x7ff, 0x088, 0x198, 0x198, 0xffe, 0xffe, 0x330, 0x330, 0x220, 0x220, 0x000, 0x000, 0x000, 0x000, 0x000),
    '$': (0x000, 0x020, 0x020, 0x0f8, 0x1fc, 0x324, 0x320, 0x320, 0x1e0, 0x0f8, 0x03c, 0x026, 0x026, 0x22e, 0x3fc, 0x1f8, 0x020, 0x020, 0x020, 0x000, 0x000),
    '%': (0x000, 0x380, 0x440, 0xc40, 0xc40, 0x440, 0x386, 0x018, 0x060, 0x180, 0x61c, 0x022, 0x023, 0x023, 0x022, 0x01c, 0x000, 0x000, 0x000, 0x000, 0x000),
    '&': (0x000, 0x0f8, 0x1f8, 0x380, 0x300, 0x100, 0x180, 0x180, 0x3c0, 0x663, 0x433, 0x41a, 0x60e, 0x70c, 0x3fe, 0x1e3, 0x000, 0x000, 0x000, 0x000, 0x000),
    "'": (0x000, 0x060, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '(': (0x000, 0x010, 0x030, 0x020, 0x060, 0x060, 0x040, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x040, 0x060, 0x060, 0x020, 0x030, 0x010, 0x000, 0x000),
    ')': (0x000, 0x080, 0x0c0, 0x040, 0x060, 0x060, 0x020, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x020, 0x060, 0x060, 0x040, 0x0c0, 0x080, 0x000, 0x000),
    '*': (0x000, 0x060, 0x060, 0x264, 0x3fc, 0x0f0, 0x0f0, 0x1fc, 0x264, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '+': (0x000, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x060, 0x7fe, 0x7fe, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    ',': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x060, 0x0c0, 0x0c0, 0x000, 0x000),
    '-': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x1f8, 0x1f8, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '.': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    '/': (0x000, 0x00c, 0x00c, 0x018, 0x018, 0x010, 0x030, 0x020, 0x060, 0x040, 0x0c0, 0x080, 0x180, 0x180, 0x300, 0x300, 0x600, 0x000, 0x000, 0x000, 0x000),
    '0': (0x000, 0x0f0, 0x1f8, 0x39c, 0x30c, 0x30c, 0x606, 0x606, 0x666, 0x666, 0x606, 0x30c, 0x30c, 0x39c, 0x1f8, 0x0f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    '1': (0x000, 0x0f0, 0x3f0, 0x330, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x1fe, 0x1fe, 0x000, 0x000, 0x000, 0x000, 0x000),
    '2': (0x000, 0x1f0, 0x3f8, 0x21c, 0x00c, 0x00c, 0x00c, 0x008, 0x018, 0x030, 0x060, 0x0c0, 0x180, 0x300, 0x7fc, 0x7fc, 0x000, 0x000, 0x000, 0x000, 0x000),
    '3': (0x000, 0x1f0, 0x3f8, 0x21c, 0x00c, 0x00c, 0x01c, 0x0f8, 0x0f8, 0x01c, 0x00c, 0x004, 0x00c, 0x61c, 0x7f8, 0x1f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    '4': (0x000, 0x018, 0x038, 0x078, 0x058, 0x0d8, 0x098, 0x198, 0x318, 0x218, 0x618, 0x7fe, 0x7fe, 0x018, 0x018, 0x018, 0x000, 0x000, 0x000, 0x000, 0x000),
    '5': (0x000, 0x3f8, 0x3f8, 0x300, 0x300, 0x300, 0x3f0, 0x3f8, 0x21c, 0x00c, 0x00c, 0x00c, 0x00c, 0x61c, 0x7f8, 0x1f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    '6': (0x000, 0x0f8, 0x1fc, 0x384, 0x300, 0x300, 0x600, 0x678, 0x7fc, 0x70c, 0x706, 0x206, 0x306, 0x30c, 0x1fc, 0x0f8, 0x000, 0x000, 0x000, 0x000, 0x000),
    '7': (0x000, 0x7fe, 0x7fc, 0x00c, 0x00c, 0x018, 0x018, 0x010, 0x030, 0x030, 0x060, 0x060, 0x060, 0x0c0, 0x0c0, 0x1c0, 0x000, 0x000, 0x000, 0x000, 0x000),
    '8': (0x000, 0x0f0, 0x3fc, 0x30c, 0x30c, 0x30c, 0x30c, 0x1f8, 0x1f8, 0x30c, 0x606, 0x606, 0x606, 0x30c, 0x3fc, 0x0f8, 0x000, 0x000, 0x000, 0x000, 0x000),
    '9': (0x000, 0x1f0, 0x3f8, 0x31c, 0x60c, 0x60c, 0x60e, 0x31e, 0x3fe, 0x1e6, 0x006, 0x00c, 0x00c, 0x21c, 0x3f8, 0x1e0, 0x000, 0x000, 0x000, 0x000, 0x000),
    ':': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    ';': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x060, 0x060, 0x060, 0x060, 0x0c0, 0x0c0, 0x000, 0x000),
    '<': (0x000, 0x000, 0x000, 0x000, 0x000, 0x002, 0x01e, 0x078, 0x1e0, 0x700, 0x700, 0x1e0, 0x078, 0x01e, 0x002, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '=': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x7fe, 0x7fe, 0x000, 0x000, 0x7fe, 0x7fe, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '>': (0x000, 0x000, 0x000, 0x000, 0x000, 0x400, 0x780, 0x1e0, 0x07c, 0x00e, 0x00e, 0x07c, 0x1e0, 0x780, 0x400, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '?': (0x000, 0x0f0, 0x3f8, 0x31c, 0x00c, 0x00c, 0x01c, 0x018, 0x030, 0x060, 0x060, 0x060, 0x060, 0x000, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    '@': (0x000, 0x000, 0x078, 0x184, 0x302, 0x602, 0x43e, 0x467, 0xcc3, 0xcc3, 0xcc3, 0xcc3, 0xcc3, 0x467, 0x43f, 0x600, 0x300, 0x180, 0x07c, 0x000, 0x000),
    'A': (0x000, 0x060, 0x0f0, 0x0f0, 0x0f0, 0x198, 0x198, 0x198, 0x198, 0x30c, 0x30c, 0x3fc, 0x7fe, 0x606, 0x606, 0x607, 0x000, 0x000, 0x000, 0x000, 0x000),
    'B': (0x000, 0x3f8, 0x3fc, 0x30c, 0x306, 0x306, 0x30c, 0x3f8, 0x3f8, 0x30c, 0x306, 0x306, 0x306, 0x30e, 0x3fc, 0x3f8, 0x000, 0x000, 0x000, 0x000, 0x000),
    'C': (0x000, 0x078, 0x1fc, 0x184, 0x300, 0x300, 0x300, 0x600, 0x600, 0x600, 0x300, 0x300, 0x300, 0x184, 0x1fc, 0x078, 0x000, 0x000, 0x000, 0x000, 0x000),
    'D': (0x000, 0x7e0, 0x7f8, 0x61c, 0x60c, 0x60c, 0x606, 0x606, 0x606, 0x606, 0x606, 0x60c, 0x60c, 0x61c, 0x7f8, 0x7e0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'E': (0x000, 0x3fe, 0x3fe, 0x300, 0x300, 0x300, 0x300, 0x3fc, 0x3fc, 0x300, 0x300, 0x300, 0x300, 0x300, 0x3fe, 0x3fe, 0x000, 0x000, 0x000, 0x000, 0x000),
    'F': (0x000, 0x3fe, 0x3fe, 0x300, 0x300, 0x300, 0x300, 0x3fc, 0x3fc, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x000, 0x000, 0x000, 0x000, 0x000),
    'G': (0x000, 0x078, 0x1fc, 0x384, 0x300, 0x600, 0x600, 0x600, 0x61e, 0x61e, 0x606, 0x606, 0x306, 0x386, 0x1fc, 0x0f8, 0x000, 0x000, 0x000, 0x000, 0x000),
    'H': (0x000, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x7fe, 0x7fe, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x000, 0x000, 0x000, 0x000, 0x000),
    'I': (0x000, 0x3fc, 0x3fc, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x3fc, 0x3fc, 0x000, 0x000, 0x000, 0x000, 0x000),
    'J': (0x000, 0x0f8, 0x0f8, 0x018, 0x018, 0x018, 0x018, 0x018, 0x018, 0x018, 0x018, 0x018, 0x018, 0x418, 0x7f8, 0x3e0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'K': (0x000, 0x606, 0x60c, 0x618, 0x638, 0x670, 0x6e0, 0x7c0, 0x7e0, 0x770, 0x630, 0x618, 0x61c, 0x60c, 0x606, 0x607, 0x000, 0x000, 0x000, 0x000, 0x000),
    'L': (0x000, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x3fe, 0x3fe, 0x000, 0x000, 0x000, 0x000, 0x000),
    'M': (0x000, 0x70e, 0x70e, 0x70e, 0x79e, 0x69e, 0x696, 0x6f6, 0x6f6, 0x666, 0x666, 0x606, 0x606, 0x606, 0x606, 0x606, 0x000, 0x000, 0x000, 0x000, 0x000),
    'N': (0x000, 0x706, 0x706, 0x786, 0x786, 0x6c6, 0x6c6, 0x646, 0x666, 0x626, 0x636, 0x636, 0x61e, 0x61e, 0x60e, 0x60e, 0x000, 0x000, 0x000, 0x000, 0x000),
    'O': (0x000, 0x0f0, 0x1f8, 0x39c, 0x30c, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x30c, 0x38c, 0x1f8, 0x0f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'P': (0x000, 0x3f8, 0x3fc, 0x30e, 0x306, 0x306, 0x306, 0x30e, 0x3fc, 0x3f8, 0x300, 0x300, 0x300, 0x300, 0x300, 0x300, 0x000, 0x000, 0x000, 0x000, 0x000),
    'Q': (0x000, 0x0f0, 0x1f8, 0x39c, 0x30c, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x30c, 0x38c, 0x1f8, 0x0f0, 0x018, 0x00c, 0x008, 0x000, 0x000),
    'R': (0x000, 0x7f0, 0x7fc, 0x61c, 0x60c, 0x60c, 0x60c, 0x7f8, 0x7f0, 0x618, 0x60c, 0x60c, 0x60e, 0x606, 0x606, 0x603, 0x000, 0x000, 0x000, 0x000, 0x000),
    'S': (0x000, 0x0f8, 0x3fc, 0x304, 0x600, 0x600, 0x300, 0x3c0, 0x1f8, 0x03c, 0x00c, 0x006, 0x006, 0x20c, 0x3fc, 0x1f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'T': (0x000, 0xfff, 0xfff, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    'U': (0x000, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x606, 0x30c, 0x30c, 0x3fc, 0x0f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'V': (0x000, 0x606, 0x606, 0x606, 0x204, 0x30c, 0x30c, 0x30c, 0x188, 0x198, 0x198, 0x090, 0x0f0, 0x0f0, 0x0f0, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    'W': (0x000, 0xc03, 0xc03, 0xc03, 0x403, 0x462, 0x666, 0x6f6, 0x6f6, 0x696, 0x696, 0x296, 0x39c, 0x39c, 0x30c, 0x30c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'X': (0x000, 0x606, 0x306, 0x30c, 0x198, 0x098, 0x0f0, 0x070, 0x060, 0x0f0, 0x0d8, 0x198, 0x30c, 0x30c, 0x606, 0xe07, 0x000, 0x000, 0x000, 0x000, 0x000),
    'Y': (0x000, 0x606, 0x606, 0x30c, 0x30c, 0x198, 0x198, 0x0f0, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    'Z': (0x000, 0x3fe, 0x3fe, 0x006, 0x00c, 0x018, 0x018, 0x030, 0x060, 0x060, 0x0c0, 0x180, 0x180, 0x300, 0x3fe, 0x3fe, 0x000, 0x000, 0x000, 0x000, 0x000),
    '[': (0x000, 0x078, 0x078, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x040, 0x078, 0x078, 0x000, 0x000),
    '\\': (0x000, 0x600, 0x300, 0x300, 0x180, 0x180, 0x080, 0x0c0, 0x040, 0x060, 0x020, 0x030, 0x010, 0x018, 0x018, 0x00c, 0x00c, 0x000, 0x000, 0x000, 0x000),
    ']': (0x000, 0x1f0, 0x1f0, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x1f0, 0x1f0, 0x000, 0x000),
    '^': (0x000, 0x060, 0x0f0, 0x198, 0x30c, 0x606, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    '_': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0xfff, 0xfff),
    '`': (0x180, 0x0c0, 0x040, 0x020, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
    'a': (0x000, 0x000, 0x000, 0x000, 0x000, 0x1f0, 0x3fc, 0x20c, 0x00c, 0x1fc, 0x3fc, 0x70c, 0x60c, 0x71c, 0x3fc, 0x1e4, 0x000, 0x000, 0x000, 0x000, 0x000),
    'b': (0x000, 0x300, 0x300, 0x300, 0x300, 0x378, 0x3fc, 0x38c, 0x306, 0x306, 0x306, 0x306, 0x306, 0x38c, 0x3fc, 0x378, 0x000, 0x000, 0x000, 0x000, 0x000),
    'c': (0x000, 0x000, 0x000, 0x000, 0x000, 0x078, 0x1fc, 0x180, 0x300, 0x300, 0x300, 0x300, 0x300, 0x180, 0x1fc, 0x078, 0x000, 0x000, 0x000, 0x000, 0x000),
    'd': (0x000, 0x00c, 0x00c, 0x00c, 0x00c, 0x1ec, 0x3fc, 0x31c, 0x60c, 0x60c, 0x60c, 0x60c, 0x60c, 0x31c, 0x3fc, 0x0ec, 0x000, 0x000, 0x000, 0x000, 0x000),
    'e': (0x000, 0x000, 0x000, 0x000, 0x000, 0x0f8, 0x1fc, 0x30c, 0x606, 0x7fe, 0x7fe, 0x600, 0x600, 0x384, 0x1fc, 0x0f8, 0x000, 0x000, 0x000, 0x000, 0x000),
    'f': (0x000, 0x03c, 0x07c, 0x060, 0x060, 0x3fc, 0x3fc, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    'g': (0x000, 0x000, 0x000, 0x000, 0x000, 0x0ec, 0x3fc, 0x31c, 0x60c, 0x60c, 0x60c, 0x60c, 0x60c, 0x31c, 0x3fc, 0x0ec, 0x00c, 0x01c, 0x3f8, 0x1f0, 0x000),
    'h': (0x000, 0x300, 0x300, 0x300, 0x300, 0x378, 0x3fc, 0x38c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'i': (0x000, 0x060, 0x060, 0x000, 0x000, 0x3e0, 0x3e0, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x3fe, 0x3fe, 0x000, 0x000, 0x000, 0x000, 0x000),
    'j': (0x000, 0x030, 0x030, 0x000, 0x000, 0x1f0, 0x1f0, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x030, 0x060, 0x3e0, 0x3c0, 0x000),
    'k': (0x000, 0x300, 0x300, 0x300, 0x300, 0x30e, 0x31c, 0x330, 0x360, 0x3e0, 0x3f0, 0x330, 0x318, 0x30c, 0x30e, 0x306, 0x000, 0x000, 0x000, 0x000, 0x000),
    'l': (0x000, 0x3c0, 0x3c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x040, 0x060, 0x07c, 0x03c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'm': (0x000, 0x000, 0x000, 0x000, 0x000, 0x7dc, 0x7fe, 0x666, 0x666, 0x666, 0x666, 0x666, 0x666, 0x666, 0x666, 0x666, 0x000, 0x000, 0x000, 0x000, 0x000),
    'n': (0x000, 0x000, 0x000, 0x000, 0x000, 0x378, 0x3fc, 0x38c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'o': (0x000, 0x000, 0x000, 0x000, 0x000, 0x0f0, 0x1fc, 0x30c, 0x30c, 0x606, 0x606, 0x606, 0x30c, 0x30c, 0x1fc, 0x0f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    'p': (0x000, 0x000, 0x000, 0x000, 0x000, 0x378, 0x3fc, 0x38c, 0x306, 0x306, 0x306, 0x306, 0x306, 0x38c, 0x3fc, 0x378, 0x300, 0x300, 0x300, 0x300, 0x000),
    'q': (0x000, 0x000, 0x000, 0x000, 0x000, 0x0ec, 0x3fc, 0x31c, 0x30c, 0x60c, 0x60c, 0x60c, 0x30c, 0x31c, 0x3fc, 0x0ec, 0x00c, 0x00c, 0x00c, 0x00c, 0x000),
    'r': (0x000, 0x000, 0x000, 0x000, 0x000, 0x09e, 0x0be, 0x0e0, 0x0c0, 0x0c0, 0x080, 0x080, 0x080, 0x080, 0x080, 0x080, 0x000, 0x000, 0x000, 0x000, 0x000),
    's': (0x000, 0x000, 0x000, 0x000, 0x000, 0x0f0, 0x1fc, 0x308, 0x300, 0x180, 0x0f8, 0x01c, 0x00c, 0x20c, 0x3fc, 0x1f0, 0x000, 0x000, 0x000, 0x000, 0x000),
    't': (0x000, 0x000, 0x0c0, 0x0c0, 0x0c0, 0x7fc, 0x7fc, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0c0, 0x0e0, 0x07c, 0x03c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'u': (0x000, 0x000, 0x000, 0x000, 0x000, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x30c, 0x31c, 0x1fc, 0x1ec, 0x000, 0x000, 0x000, 0x000, 0x000),
    'v': (0x000, 0x000, 0x000, 0x000, 0x000, 0x606, 0x206, 0x30c, 0x30c, 0x108, 0x198, 0x198, 0x090, 0x0f0, 0x0f0, 0x060, 0x000, 0x000, 0x000, 0x000, 0x000),
    'w': (0x000, 0x000, 0x000, 0x000, 0x000, 0xc03, 0xc03, 0x402, 0x662, 0x666, 0x666, 0x2f6, 0x294, 0x39c, 0x39c, 0x30c, 0x000, 0x000, 0x000, 0x000, 0x000),
    'x': (0x000, 0x000, 0x000, 0x000, 0x000, 0x606, 0x30c, 0x198, 0x0f0, 0x0f0, 0x060, 0x0f0, 0x198, 0x198, 0x30c, 0x606, 0x000, 0x000, 0x000, 0x000, 0x000),
    'y': (0x000, 0x000, 0x000, 0x000, 0x000, 0x606, 0x206, 0x30c, 0x30c, 0x188, 0x198, 0x098, 0x0d0, 0x070, 0x060, 0x060, 0x060, 0x0c0, 0x3c0, 0x380, 0x000),
    'z': (0x000, 0x000, 0x000, 0x000, 0x000, 0x3fc, 0x3fc, 0x008, 0x018, 0x030, 0x060, 0x0c0, 0x080, 0x100, 0x3fc, 0x3fc, 0x000, 0x000, 0x000, 0x000, 0x000),
    '{': (0x000, 0x03c, 0x03c, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x3c0, 0x3c0, 0x0e0, 0x060, 0x060, 0x060, 0x060, 0x060, 0x03c, 0x03c, 0x000, 0x000),
    '|': (0x000, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060),
    '}': (0x000, 0x3c0, 0x3c0, 0x060, 0x060, 0x060, 0x060, 0x060, 0x060, 0x03c, 0x03c, 0x070, 0x060, 0x060, 0x060, 0x060, 0x060, 0x3c0, 0x3c0, 0x000, 0x000),
    '~': (0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x3c2, 0x7fe, 0x43c, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000, 0x000),
}

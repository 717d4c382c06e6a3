#!/usr/bin/env python3
# Copyright 2026  The hwcls Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the checked-in assets under data/.

  data/glyphs.jsonl   two synthetic writers, polyline glyphs for 0-9 . - a-z
  data/font5x9.json   5x9 bitmap font (digits, A-Z, a-z, '.', '-')
  data/words.txt      wordlist for the "word" class

Glyph coordinates live in a 100-unit em box with y pointing down:
ascender line 10, x-height 40, baseline 75, descender 95. Every glyph
carries "frame": [0, 100] so normalization keeps the shared baseline.
"""

import base64
import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def arc(cx, cy, rx, ry, a0, a1, n=16):
    pts = []
    for i in range(n + 1):
        a = math.radians(a0 + (a1 - a0) * i / n)
        pts.append((cx + rx * math.cos(a), cy - ry * math.sin(a)))
    return pts


def ring(cx, cy, rx, ry, start=90, n=20, ccw=True):
    return arc(cx, cy, rx, ry, start, start + (360 if ccw else -360), n)


def base_glyphs():
    g = {}
    # digits: cap height 15..75
    g["0"] = [ring(15, 45, 13, 30)]
    g["1"] = [[(7, 26), (18, 15), (18, 75)]]
    g["2"] = [arc(15, 30, 13, 15, 160, -40) + [(2, 75), (30, 75)]]
    g["3"] = [arc(14, 30, 13, 15, 150, -90, 12) + arc(14, 60, 15, 15, 90, -150, 12)]
    g["4"] = [[(23, 75), (23, 15), (2, 55), (31, 55)]]
    g["5"] = [[(28, 15), (7, 15), (5, 42)] + arc(15, 57, 15, 18, 125, -145, 14)]
    g["6"] = [[(26, 17), (17, 16)] + arc(17, 48, 15, 31, 95, 200, 8)
              + ring(16, 60, 13, 15, 200, 18)]
    g["7"] = [[(2, 15), (30, 15), (12, 75)]]
    g["8"] = [ring(15, 29, 11, 14, 270, 18, ccw=False)
              + ring(15, 60, 14, 15, 90, 18)[1:]]
    g["9"] = [ring(15, 31, 13, 16, 0, 18) + [(24, 75)]]
    g["."] = [ring(3, 72, 2.5, 2.5, 0, 8)]
    g["-"] = [[(0, 52), (20, 52)]]
    # lowercase: x-height 40..75, ascenders 10, descenders 95
    g["a"] = [ring(13, 58, 12, 17, 0), [(25, 40), (25, 75)]]
    g["b"] = [[(3, 10), (3, 75)], ring(15, 58, 12, 17, 180)]
    g["c"] = [arc(14, 58, 12, 17, 45, 315)]
    g["d"] = [ring(12, 58, 12, 17, 0), [(24, 10), (24, 75)]]
    g["e"] = [[(2, 58), (26, 58)] + arc(14, 58, 12, 17, 0, 315)[1:]]
    g["f"] = [[(22, 14), (16, 10), (10, 14), (9, 22), (9, 75)], [(2, 42), (18, 42)]]
    g["g"] = [ring(12, 57, 11, 16, 0), [(23, 40), (23, 85)] + arc(13, 85, 10, 9, 0, -150, 8)[1:]]
    g["h"] = [[(3, 10), (3, 75)], [(3, 52), (8, 43), (15, 40), (22, 43), (24, 50), (24, 75)]]
    g["i"] = [[(4, 40), (4, 75)], ring(4, 28, 1.5, 1.5, 0, 6)]
    g["j"] = [[(12, 40), (12, 88), (8, 94), (2, 92)], ring(12, 28, 1.5, 1.5, 0, 6)]
    g["k"] = [[(3, 10), (3, 75)], [(22, 40), (3, 60)], [(9, 55), (24, 75)]]
    g["l"] = [[(4, 10), (4, 75)]]
    g["m"] = [[(3, 40), (3, 75)], [(3, 50), (8, 41), (13, 42), (15, 50), (15, 75)],
              [(15, 50), (20, 41), (26, 42), (28, 50), (28, 75)]]
    g["n"] = [[(3, 40), (3, 75)], [(3, 50), (9, 41), (17, 41), (22, 48), (22, 75)]]
    g["o"] = [ring(13, 58, 12, 17)]
    g["p"] = [[(3, 40), (3, 95)], ring(15, 57, 12, 17, 180)]
    g["q"] = [ring(12, 57, 12, 17, 0), [(24, 40), (24, 95)]]
    g["r"] = [[(3, 40), (3, 75)], [(3, 52), (9, 42), (18, 40)]]
    g["s"] = [[(22, 44), (15, 40), (6, 42), (4, 50), (12, 57), (20, 62), (22, 70),
               (14, 75), (3, 72)]]
    g["t"] = [[(9, 18), (9, 70), (13, 75), (19, 74)], [(2, 42), (18, 42)]]
    g["u"] = [[(3, 40), (3, 65), (8, 75), (16, 75), (22, 66)], [(22, 40), (22, 75)]]
    g["v"] = [[(1, 40), (12, 75), (23, 40)]]
    g["w"] = [[(1, 40), (8, 75), (15, 50), (22, 75), (29, 40)]]
    g["x"] = [[(2, 40), (22, 75)], [(22, 40), (2, 75)]]
    g["y"] = [[(2, 40), (12, 70)], [(23, 40), (10, 88), (4, 94)]]
    g["z"] = [[(3, 40), (22, 40), (3, 75), (23, 75)]]
    return g


def writer_b_overrides(g):
    g = dict(g)
    g["1"] = [[(15, 15), (15, 75)]]
    g["7"] = [[(2, 18), (30, 15), (12, 75)], [(8, 45), (26, 45)]]
    g["4"] = [[(4, 15), (2, 52), (30, 52)], [(22, 30), (22, 75)]]
    g["a"] = [arc(13, 58, 12, 17, 40, 330) + [(25, 40), (25, 75)]]
    g["."] = [[(2, 71), (4, 73), (3, 74)]]
    return g


def variant(strokes, rng, slant, xscale):
    sx = xscale * rng.uniform(0.92, 1.08)
    sl = slant + rng.uniform(-0.06, 0.06)
    out = []
    for s in strokes:
        pts = []
        for (x, y) in s:
            nx = x * sx + (75 - y) * sl + rng.gauss(0, 0.7)
            ny = y + rng.gauss(0, 0.7)
            pts.append([round(nx, 2), round(ny, 2)])
        out.append(pts)
    return out


def write_glyphs():
    rng = random.Random(20210301)
    writers = [("writer_a", base_glyphs(), 0.0, 1.0),
               ("writer_b", writer_b_overrides(base_glyphs()), 0.22, 0.88)]
    lines = []
    for name, glyphs, slant, xscale in writers:
        for ch in sorted(glyphs):
            for _ in range(3):
                rec = {"writer": name, "char": ch,
                       "strokes": variant(glyphs[ch], rng, slant, xscale),
                       "frame": [0, 100]}
                lines.append(json.dumps(rec, separators=(",", ":")))
    with open(os.path.join(DATA, "glyphs.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")


FONT_UPPER = {
    "0": "01110 10001 10011 10101 11001 10001 01110",
    "1": "00100 01100 00100 00100 00100 00100 01110",
    "2": "01110 10001 00001 00010 00100 01000 11111",
    "3": "11111 00010 00100 00010 00001 10001 01110",
    "4": "00010 00110 01010 10010 11111 00010 00010",
    "5": "11111 10000 11110 00001 00001 10001 01110",
    "6": "00110 01000 10000 11110 10001 10001 01110",
    "7": "11111 00001 00010 00100 01000 01000 01000",
    "8": "01110 10001 10001 01110 10001 10001 01110",
    "9": "01110 10001 10001 01111 00001 00010 01100",
    "A": "01110 10001 10001 11111 10001 10001 10001",
    "B": "11110 10001 10001 11110 10001 10001 11110",
    "C": "01110 10001 10000 10000 10000 10001 01110",
    "D": "11100 10010 10001 10001 10001 10010 11100",
    "E": "11111 10000 10000 11110 10000 10000 11111",
    "F": "11111 10000 10000 11110 10000 10000 10000",
    "G": "01110 10001 10000 10111 10001 10001 01111",
    "H": "10001 10001 10001 11111 10001 10001 10001",
    "I": "01110 00100 00100 00100 00100 00100 01110",
    "J": "00111 00010 00010 00010 00010 10010 01100",
    "K": "10001 10010 10100 11000 10100 10010 10001",
    "L": "10000 10000 10000 10000 10000 10000 11111",
    "M": "10001 11011 10101 10101 10001 10001 10001",
    "N": "10001 10001 11001 10101 10011 10001 10001",
    "O": "01110 10001 10001 10001 10001 10001 01110",
    "P": "11110 10001 10001 11110 10000 10000 10000",
    "Q": "01110 10001 10001 10001 10101 10010 01101",
    "R": "11110 10001 10001 11110 10100 10010 10001",
    "S": "01111 10000 10000 01110 00001 00001 11110",
    "T": "11111 00100 00100 00100 00100 00100 00100",
    "U": "10001 10001 10001 10001 10001 10001 01110",
    "V": "10001 10001 10001 10001 10001 01010 00100",
    "W": "10001 10001 10001 10101 10101 10101 01010",
    "X": "10001 10001 01010 00100 01010 10001 10001",
    "Y": "10001 10001 10001 01010 00100 00100 00100",
    "Z": "11111 00001 00010 00100 01000 10000 11111",
    ".": "00000 00000 00000 00000 00000 01100 01100",
    "-": "00000 00000 00000 11111 00000 00000 00000",
}

FONT_LOWER = {
    "a": "00000 00000 01110 00001 01111 10001 01111 00000 00000",
    "b": "10000 10000 10110 11001 10001 10001 11110 00000 00000",
    "c": "00000 00000 01110 10000 10000 10001 01110 00000 00000",
    "d": "00001 00001 01101 10011 10001 10001 01111 00000 00000",
    "e": "00000 00000 01110 10001 11111 10000 01110 00000 00000",
    "f": "00110 01001 01000 11100 01000 01000 01000 00000 00000",
    "g": "00000 00000 01111 10001 10001 01111 00001 10001 01110",
    "h": "10000 10000 10110 11001 10001 10001 10001 00000 00000",
    "i": "00100 00000 01100 00100 00100 00100 01110 00000 00000",
    "j": "00010 00000 00110 00010 00010 00010 00010 10010 01100",
    "k": "10000 10000 10010 10100 11000 10100 10010 00000 00000",
    "l": "01100 00100 00100 00100 00100 00100 01110 00000 00000",
    "m": "00000 00000 11010 10101 10101 10001 10001 00000 00000",
    "n": "00000 00000 10110 11001 10001 10001 10001 00000 00000",
    "o": "00000 00000 01110 10001 10001 10001 01110 00000 00000",
    "p": "00000 00000 11110 10001 10001 11110 10000 10000 10000",
    "q": "00000 00000 01101 10011 10001 01111 00001 00001 00001",
    "r": "00000 00000 10110 11001 10000 10000 10000 00000 00000",
    "s": "00000 00000 01111 10000 01110 00001 11110 00000 00000",
    "t": "01000 01000 11100 01000 01000 01001 00110 00000 00000",
    "u": "00000 00000 10001 10001 10001 10011 01101 00000 00000",
    "v": "00000 00000 10001 10001 10001 01010 00100 00000 00000",
    "w": "00000 00000 10001 10001 10101 10101 01010 00000 00000",
    "x": "00000 00000 10001 01010 00100 01010 10001 00000 00000",
    "y": "00000 00000 10001 10001 10001 01111 00001 10001 01110",
    "z": "00000 00000 11111 00010 00100 01000 11111 00000 00000",
}


def write_font():
    glyphs = {}
    for table, pad in ((FONT_UPPER, 2), (FONT_LOWER, 0)):
        for ch, rows in table.items():
            rows = rows.split() + ["00000"] * pad
            assert len(rows) == 9 and all(len(r) == 5 for r in rows), ch
            bits = bytes(int(c) for r in rows for c in r)
            glyphs[ch] = base64.b64encode(bits).decode("ascii")
    doc = {"name": "hwcls-5x9", "cell_width": 5, "cell_height": 9,
           "encoding": "base64 row-major, one byte per pixel, 1 = ink",
           "glyphs": dict(sorted(glyphs.items()))}
    with open(os.path.join(DATA, "font5x9.json"), "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


WORDS = """
about above across after again against almost alone along already also always
among animal answer apple archive around artist autumn basket beach become before
begin behind believe below better between beyond black blue board border bottle
bread bridge bright brother brown build butter cabinet camera candle canvas carpet
castle center chair change chapter church circle city clear close cloud coast
collect colour common corner country course cover cream crowd danger dark daughter
decide deep design desk dinner doctor double dream drawing early earth east easy
edge eight empty enough evening every example family famous farmer father feather
field figure final finger fire flower follow forest forget found frame friend
garden gather gentle glass golden green ground group guide happen harbour heart
heavy hidden history holiday horse house hunter island journey kitchen knife ladder
language large later leader letter light little long market master meadow member
middle minute mirror modern morning mother mountain museum music narrow nature
never night noble north number ocean office often orange order other painter
palace paper parent people pencil picture place planet pocket portrait present
pretty public purple quiet rather reason record river round saddle sailor school
second secret seven shadow silver simple sister small smooth soldier south spring
square station stone story street strong summer sunday surface table teacher
thousand through ticket today together tower travel under until valley village
violet visit water weather window winter wonder yellow young
abend album alter anfang arbeit bild blume brief buch dank dorf freund garten
geschichte gruss haus himmel jahr kirche kunst leben maler meister morgen nacht
papier platz reise sammlung schule sommer stadt strasse tisch wald wasser welt
zeichnung zimmer
amour bateau blanc cadeau chanson chemin couleur dessin ecole fenetre fleur
galerie jardin lettre lumiere maison marchand monde musee nuit oeuvre papier
peintre plume portrait riviere soleil tableau toile vendredi ville voyage
""".split()


def write_words():
    words = sorted(set(WORDS))
    for w in words:
        assert w.isascii() and w.isalpha() and w.islower(), w
    with open(os.path.join(DATA, "words.txt"), "w") as f:
        f.write("\n".join(words) + "\n")


if __name__ == "__main__":
    os.makedirs(DATA, exist_ok=True)
    write_glyphs()
    write_font()
    write_words()

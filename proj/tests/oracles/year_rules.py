"""Year rule table v1 from docs/year-rules.md, as an independent tokenizer
(no regular expressions)."""

QUALIFIERS = ["approximately", "approx.", "approx", "circa", "ca.", "ca", "c.", "omstreeks", "around"]

EXPRESSIONS = [
    "1945", " 1945 ", "ca. 1943-1944", "ca.1943", "c. 1942", "circa 1940", "approx. 1939", "omstreeks 1944",
    "around 1941", "1943-1944", "1943 - 1944", "1943–1944", "1943 — 1944", "1941/1942",
    "1942-ca. 1944", "1944-45", "1949-50", "1999-05", "1940s", "1930's", "1945-1943", "1945?", "undated",
    "", "194", "19455", "March 1943", "1943-1943", "CA. 1943", "Circa  1942 - 1943", "ca. ca. 1940",
    "1943-44-45", "s.d.",
]


def strip_qualifiers(s):
    changed = True
    while changed:
        changed = False
        for q in QUALIFIERS:
            # a qualifier is a whole token, or a dotted one glued to the year
            if s.startswith(q + " ") or (q.endswith(".") and s.startswith(q)):
                s = s[len(q):].strip()
                changed = True
    return s


def is_year(t):
    return len(t) == 4 and t.isdigit()


def parse(expr):
    s = " ".join(expr.replace("–", "-").replace("—", "-").split()).lower()
    s = strip_qualifiers(s)
    if is_year(s):
        return [int(s), int(s)]
    if len(s) == 5 and s.endswith("0s") and s[:3].isdigit():
        return [int(s[:4]), int(s[:4]) + 9]
    if len(s) == 6 and s.endswith("0's") and s[:3].isdigit():
        return [int(s[:4]), int(s[:4]) + 9]
    for sep in ("-", "/"):
        parts = [p.strip() for p in s.split(sep)]
        if len(parts) != 2 or not is_year(parts[0]):
            continue
        a = int(parts[0])
        second = parts[1]
        if second.startswith("ca."):
            second = second[3:].strip()
        elif second.startswith("ca "):
            second = second[3:].strip()
        if is_year(second):
            b = int(second)
            return [a, b] if a <= b else None
        if sep == "-" and len(second) == 2 and second.isdigit() and parts[1] == second:
            b = a // 100 * 100 + int(second)
            return [a, b] if a <= b else None
    return None


def generate():
    return {"version": 1, "cases": [{"expression": e, "range": parse(e)} for e in EXPRESSIONS]}

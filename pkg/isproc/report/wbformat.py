"""Formats for report workbooks."""

HL_COLORS = {
    "HL_YELLOW": "#FFFA81",
    "HL_ORANGE": "#FFD3B6",
    "HL_RED": "#FFAAA5",
    "HL_GREEN": "#85CA5D",
    "HL_GREY": "#D3D3D3",
}

HEADER_FORMAT = {"bold": True, "bottom": 1}

# Row highlight per report status
STATUS_HIGHLIGHT = {
    "pass": None,
    "fail": "HL_RED",
    "inconclusive": "HL_YELLOW",
    "invalid": "HL_ORANGE",
}

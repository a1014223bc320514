"""Useful string functions for isproc files."""
from collections import namedtuple


ConfigLine = namedtuple("ConfigLine", ["number", "text"])


def clean_string(text):
    """Clean a line of a configuration file.

    Leading and trailing whitespace is removed. Newlines are converted to
    the UNIX style and runs of spaces collapse to one.

    Args:
        text (str): String to be cleaned.

    Returns:
        The cleaned string.
    """
    text = text.strip()
    text = text.replace("\r\n", "\n")
    text = text.replace("\r", "\n")
    text = text.replace("\t", " ")
    text = space_space_fix(text)
    return text


def space_space_fix(text):
    """Replace "space-space" with "space".

    Args:
        text (str): The string to work with

    Returns:
        The text with the appropriate fix.
    """
    space_space = "  "
    space = " "
    while space_space in text:
        text = text.replace(space_space, space)
    return text


def config_lines(text):
    """Yield numbered, cleaned lines, skipping blanks and ``#`` comments.

    Line numbers are 1-based.
    """
    for number, line in enumerate(text.splitlines(), start=1):
        line = clean_string(line)
        if not line or line.startswith("#"):
            continue
        yield ConfigLine(number, line)


def split_arguments(text, sep=","):
    """Split on ``sep`` outside double quotes and parentheses.

    Args:
        text (str): Argument text, e.g. ``decrn(2), 5``

    Returns:
        A list of stripped parts; an empty list for blank text.
    """
    parts = []
    depth = 0
    quoted = False
    current = []
    for char in text:
        if char == '"':
            quoted = not quoted
        elif not quoted and char == "(":
            depth += 1
        elif not quoted and char == ")":
            depth -= 1
        if char == sep and not quoted and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    last = "".join(current).strip()
    if last or parts:
        parts.append(last)
    return parts


def unquote(text):
    """Remove one pair of surrounding double quotes, if present."""
    if len(text) >= 2 and text[0] == text[-1] == '"':
        return text[1:-1]
    return text


def read_text(path):
    """Return the contents of a UTF-8 text file."""
    with open(path, encoding="utf-8") as file:
        return file.read()

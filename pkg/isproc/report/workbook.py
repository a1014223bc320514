"""Report tables written to and read from Excel files."""
import os.path

import xlrd
import xlsxwriter
from xlsxwriter.utility import xl_rowcol_to_cell

from isproc.report import wbformat


class ReportTable:
    """A named table with a header row and optionally highlighted rows.

    Instance attributes:
        name (str): The worksheet name
        header (list): Column headers
        rows (list): Rows of values, each a list as long as the header
        highlights (list): Per row a key of wbformat.HL_COLORS or None
    """

    def __init__(self, name, header):
        """Initialize an empty table."""
        self.name = name
        self.header = list(header)
        self.rows = []
        self.highlights = []

    def append(self, row, highlight=None):
        """Add a row, highlighted with color key ``highlight``.

        Raises:
            ValueError: If the row does not match the header
        """
        row = list(row)
        if len(row) != len(self.header):
            msg = f"Row has {len(row)} cells, header has {len(self.header)}"
            raise ValueError(msg)
        self.rows.append(row)
        self.highlights.append(highlight)

    def to_text(self, sep="\t"):
        """Return the table as separated text, header first."""
        lines = [sep.join(self.header)]
        lines.extend(sep.join(str(value) for value in row) for row in self.rows)
        return "\n".join(lines)

    def __len__(self):
        """Return the number of rows without the header."""
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __repr__(self):
        return f'<ReportTable(name="{self.name}"), rows={len(self)}>'


def init_formats(wb):
    """Add highlight formats to workbook and return them by color key.

    Args:
        wb (xlsxwriter.Workbook): The workbook to write to

    Returns:
        A dictionary with colors as keys and formats as values
    """
    formats = {}
    for k, v in wbformat.HL_COLORS.items():
        formats[k] = wb.add_format({"bg_color": v})
    return formats


def write_out(path, tables):
    """Write report tables to an .xlsx file, one worksheet per table.

    Args:
        path (str): The path where to write the Excel file
        tables: Sequence of ReportTable
    """
    wb = xlsxwriter.Workbook(path)
    formats = init_formats(wb)
    header_format = wb.add_format(wbformat.HEADER_FORMAT)
    for table in tables:
        ws = wb.add_worksheet(table.name)
        ws.write_row(0, 0, table.header, header_format)
        for i, (row, highlight) in enumerate(zip(table.rows, table.highlights), 1):
            this_format = formats[highlight] if highlight else None
            for j, value in enumerate(row):
                if not isinstance(value, (int, float, str, bool)):
                    value = str(value)
                try:
                    if this_format is None:
                        ws.write(i, j, value)
                    else:
                        ws.write(i, j, value, this_format)
                except TypeError as err:
                    xl_name = xl_rowcol_to_cell(i, j)
                    msg = (
                        f"Unable to save XLSX file because unexpected type at "
                        f"cell {xl_name} in sheet '{table.name}'. Found {value!r}"
                    )
                    raise TypeError(msg) from err
    wb.close()


def cell_value(cell):
    """Get the text of an xlrd.Cell, integers without a decimal point."""
    if cell.ctype == xlrd.XL_CELL_EMPTY:
        return ""
    if cell.ctype == xlrd.XL_CELL_BOOLEAN:
        return "T" if cell.value == 1 else "F"
    if cell.ctype == xlrd.XL_CELL_NUMBER:
        # Make integer what is equal to an integer
        int_val = int(cell.value)
        return str(int_val if int_val == cell.value else cell.value)
    if cell.ctype == xlrd.XL_CELL_TEXT:
        return cell.value.strip()
    msg = f"Unhandled cell found!\nType: {cell.ctype}\nValue: {cell.value}"
    raise TypeError(msg)


def read_rows(path, sheet=0):
    """Read one worksheet of an Excel file as rows of strings.

    Args:
        path (str): The path where to find the Excel file
        sheet: Index or name of the worksheet

    Returns:
        A list of rows, header included.
    """
    ext = os.path.splitext(path)[1]
    if ext not in (".xls", ".xlsx"):
        raise TypeError(f'Unsupported file type. Extension: "{ext}"')
    with xlrd.open_workbook(path) as book:
        if isinstance(sheet, int):
            ws = book.sheet_by_index(sheet)
        else:
            ws = book.sheet_by_name(sheet)
        return [[cell_value(cell) for cell in ws.row(i)] for i in range(ws.nrows)]

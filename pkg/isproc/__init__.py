"""Instruction sequences, threads, services and functional units."""
from isproc.isa import InstrSeq, parse
from isproc.processing import Budget, run
from isproc.services import ServiceFamily
from isproc.threads import RegularThread, extract

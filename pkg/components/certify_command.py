"""
Comando certify-all: todas las comprobaciones de aceptación en una tabla
"""
import json
import logging

from utils.export_helper import add_total_row, render_text_table, write_table, write_workbook
from utils.verification import certification_tables, SUMMARY_SHEET

logger = logging.getLogger(__name__)


class CertifyCommand:
    name = 'certify-all'
    help = "Ejecuta todas las comprobaciones y resume el resultado"
    # --out recibe la tabla (.csv, .json o .xlsx); el resumen va a la salida estándar
    exports_table = True

    def __init__(self, settings):
        self.settings = settings

    @staticmethod
    def add_arguments(parser):
        parser.add_argument('--m-max', type=int, default=9, help="mayor M comprobado (por defecto 9)")
        parser.add_argument('--extended', action='store_true', help="añade L(M,M-1) para M = 10..13")
        parser.add_argument('--draws', type=int, default=20, help="vectores diagonales aleatorios por M")
        parser.add_argument('--cases', type=int, default=1000, help="casos por propiedad algebraica")

    def run(self, args):
        tables = certification_tables(self.settings, m_max=args.m_max, extended=args.extended,
                                      prop2_draws=args.draws, property_cases=args.cases)
        summary = tables[SUMMARY_SHEET]
        code = 0 if summary['passed'].all() else 1
        if args.out:
            # el libro XLSX lleva una hoja por tabla; CSV y JSON solo el resumen
            if args.out.lower().endswith('.xlsx'):
                write_workbook(tables, args.out)
            else:
                write_table(summary, args.out)
        if args.format == 'json':
            return code, json.dumps(json.loads(summary.to_json(orient='records')), ensure_ascii=False, indent=2)
        return code, render_text_table(add_total_row(summary))

"""
Helper para exportar tablas de resultados a CSV, JSON y XLSX
"""
import json
import logging
import os
from typing import Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)

SUPPORTED_EXTENSIONS = ('.csv', '.json', '.xlsx')


def _ensure_directory(path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def _clean_sheet_name(name):
    # Excel limita los nombres de hoja a 31 caracteres sin barras
    return name.replace("/", "_").replace("\\", "_")[:31]


def write_table(dataframe: pd.DataFrame, path: str, sheet_name: str = "Resultados") -> str:
    """
    Escribe un DataFrame según la extensión del archivo

    Args:
        dataframe: DataFrame de pandas a exportar
        path: Ruta de destino (.csv, .json o .xlsx)
        sheet_name: Nombre de la hoja para XLSX

    Returns:
        La ruta escrita
    """
    extension = os.path.splitext(path)[1].lower()
    if extension not in SUPPORTED_EXTENSIONS:
        raise ValueError(f"Extensión no soportada {extension!r}; use {', '.join(SUPPORTED_EXTENSIONS)}")
    _ensure_directory(path)
    if extension == '.csv':
        dataframe.to_csv(path, index=False)
    elif extension == '.json':
        records = json.loads(dataframe.to_json(orient='records'))
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(records, handle, ensure_ascii=False, indent=2)
    else:
        with pd.ExcelWriter(path, engine='openpyxl') as writer:
            dataframe.to_excel(writer, sheet_name=_clean_sheet_name(sheet_name), index=False)
    logger.info("Tabla con %d filas exportada a %s", len(dataframe), path)
    return path


def write_workbook(tables: Dict[str, pd.DataFrame], path: str) -> str:
    """
    Crea un archivo Excel con múltiples hojas

    Args:
        tables: Diccionario con {nombre_hoja: dataframe}
        path: Ruta .xlsx de destino
    """
    if not path.lower().endswith('.xlsx'):
        raise ValueError("write_workbook solo escribe archivos .xlsx")
    _ensure_directory(path)
    with pd.ExcelWriter(path, engine='openpyxl') as writer:
        for sheet_name, dataframe in tables.items():
            if not dataframe.empty:
                dataframe.to_excel(writer, sheet_name=_clean_sheet_name(sheet_name), index=False)
    return path


def render_text_table(dataframe: pd.DataFrame) -> str:
    """Tabla de texto de ancho fijo para la salida de consola"""
    if dataframe.empty:
        return "(sin filas)"
    return dataframe.to_string(index=False)


def add_total_row(dataframe: pd.DataFrame,
                  pass_column: str = 'passed',
                  label_column: Optional[str] = None,
                  total_label: str = "TOTAL",
                  exclude_columns: Optional[List[str]] = None) -> pd.DataFrame:
    """
    Agrega una fila de resumen: cuenta de comprobaciones correctas en la
    columna pass_column y suma de las columnas numéricas restantes.

    Args:
        dataframe: DataFrame original
        pass_column: Columna booleana de resultado
        label_column: Columna donde colocar la etiqueta (primera columna por defecto)
        total_label: Etiqueta para la fila total
        exclude_columns: Columnas numéricas que no se suman
    """
    if dataframe.empty:
        return dataframe

    df_copy = dataframe.copy()
    label_column = label_column or df_copy.columns[0]
    exclude_columns = set(exclude_columns or [])
    total_row = {col: "" for col in df_copy.columns}
    total_row[label_column] = total_label
    for col in df_copy.select_dtypes(include='number').columns:
        if col not in exclude_columns and col != label_column:
            total_row[col] = df_copy[col].sum()
    if pass_column in df_copy.columns:
        passed = int(df_copy[pass_column].astype(bool).sum())
        total_row[pass_column] = f"{passed}/{len(df_copy)}"
    return pd.concat([df_copy.astype(object), pd.DataFrame([total_row])], ignore_index=True)

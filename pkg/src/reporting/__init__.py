"""Report emission: JSON, CSV and markdown summaries."""

from src.reporting.report_writer import SummaryWriter, emit_report, report_json, table_csv, write_summary

__all__ = ["SummaryWriter", "emit_report", "report_json", "table_csv", "write_summary"]

from .report_writer import ReportWriter, RunReport, emit_report

__all__ = ["ReportWriter", "RunReport", "emit_report"]

"""
Exporters Module

- report_exporter: JSON, text and CSV reports
"""

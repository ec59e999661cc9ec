"""Tests for the output module."""

import logging

from src.hgsa.output import QuietConsole, configure_logging, console, is_quiet, set_quiet


class TestQuietConsole:
    """Test QuietConsole functionality."""

    def test_default_not_quiet(self):
        """Console should not be quiet by default."""
        qc = QuietConsole()
        assert qc.quiet is False

    def test_set_quiet(self):
        qc = QuietConsole()
        qc.quiet = True
        assert qc.quiet is True
        qc.quiet = False
        assert qc.quiet is False

    def test_print_suppressed_in_quiet_mode(self, capsys):
        qc = QuietConsole()
        qc.quiet = True
        qc.print("This should not appear")
        assert "This should not appear" not in capsys.readouterr().out

    def test_document_printed_in_quiet_mode(self, capsys):
        """Reports are the product of a command and survive --quiet."""
        qc = QuietConsole()
        qc.quiet = True
        qc.document('{"pass": true}\n')
        assert '{"pass": true}' in capsys.readouterr().out

    def test_status_returns_nullcontext_in_quiet_mode(self):
        qc = QuietConsole()
        qc.quiet = True
        with qc.status("Working..."):
            pass


class TestGlobalConsole:
    """Test global console functions."""

    def test_set_quiet_global(self):
        original = is_quiet()
        try:
            set_quiet(True)
            assert is_quiet() is True
            assert console.quiet is True
            set_quiet(False)
            assert is_quiet() is False
        finally:
            set_quiet(original)


class TestLogging:
    """Test log level selection."""

    def test_verbose_sets_debug(self):
        configure_logging(True)
        assert logging.getLogger().level == logging.DEBUG
        configure_logging(False)
        assert logging.getLogger().level == logging.WARNING

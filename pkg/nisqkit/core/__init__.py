"""Core components: settings, errors and logging."""

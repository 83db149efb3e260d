"""Command-line helpers: figure presets and SVG charts."""

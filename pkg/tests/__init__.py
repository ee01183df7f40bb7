# Tests initialization for PyShatter

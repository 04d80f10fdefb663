# Diagnostic checks package

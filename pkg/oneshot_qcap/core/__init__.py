# Core subpackage

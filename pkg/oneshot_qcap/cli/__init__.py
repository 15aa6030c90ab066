# Command line subpackage

# Tests package for InfoRel

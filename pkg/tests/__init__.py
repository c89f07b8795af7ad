# Test suite for balab

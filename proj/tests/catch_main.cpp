// Single compilation of the amalgamated Catch2 sources, linked into every
// test executable.
#include <catch2/catch_amalgamated.cpp>

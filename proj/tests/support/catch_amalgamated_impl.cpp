// Single translation unit for the amalgamated Catch2 implementation,
// shared by every test binary.
#include <catch2/catch_amalgamated.cpp>

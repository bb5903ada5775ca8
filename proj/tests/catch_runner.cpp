// Single translation unit for the amalgamated Catch2 implementation.
#include <catch2/catch_amalgamated.cpp>

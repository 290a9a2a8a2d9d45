#include <gtest/gtest.h>
TEST(Stub, Todo) { SUCCEED(); }

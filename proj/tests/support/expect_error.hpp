#pragma once

#include <gtest/gtest.h>

#include "ipi/error.hpp"

// Passes when `statement` throws ipi::Error carrying `expected`.
#define EXPECT_IPI_ERROR(statement, expected)                                   \
  do {                                                                          \
    bool ipi_thrown_ = false;                                                   \
    try {                                                                       \
      statement;                                                                \
    } catch (const ::ipi::Error& ipi_e_) {                                      \
      ipi_thrown_ = true;                                                       \
      EXPECT_EQ(ipi_e_.code(), (expected))                                      \
          << "got " << ::ipi::to_string(ipi_e_.code()) << ": " << ipi_e_.what(); \
    }                                                                           \
    EXPECT_TRUE(ipi_thrown_) << "no ipi::Error from " #statement;              \
  } while (0)

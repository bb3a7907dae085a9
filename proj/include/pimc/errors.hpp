// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pimc
{

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class parse_error : public error
{
    std::size_t _line;
    std::size_t _column;

public:
    parse_error( const std::string& message, std::size_t line, std::size_t column )
        : error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + message ),
          _line{ line }, _column{ column } {}

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
};

class division_by_zero : public error
{
public:
    using error::error;
};

class solver_error : public error
{
public:
    using error::error;
};

class budget_exceeded : public error
{
    double _bound;

public:
    budget_exceeded( const std::string& message, double bound )
        : error( message ), _bound{ bound } {}

    [[nodiscard]] double bound() const { return _bound; }
};

} // namespace pimc

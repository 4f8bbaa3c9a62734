/*
 * Copyright 2026 The plmu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plmu {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Formula outside the fragment an operation accepts (not normal form, open, ...).
class FormulaError : public Error {
public:
    using Error::Error;
};

/// Malformed model, valuation or profile input.
class ModelError : public Error {
public:
    using Error::Error;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("no valuation entry for free variable " + name), name_(name) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// A fixpoint iteration hit its cap; carries the last sup-norm change observed.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& where, double residual)
        : Error(where + ": iteration cap exceeded (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(double profiles, double budget)
        : Error("strategy profile space " + std::to_string(profiles) +
                " exceeds enumeration budget " + std::to_string(budget)),
          profiles_(profiles) {}

    double profiles() const { return profiles_; }

private:
    double profiles_;
};

} // namespace plmu

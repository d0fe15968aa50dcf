#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frameforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input could not be opened, read or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A corpus record or corpus-level invariant is violated. `line()` is the
/// 1-based line of the offending record, or 0 when not tied to one line.
class CorpusError : public Error {
public:
    explicit CorpusError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Malformed FFE1 embedding file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied argument is outside the operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace frameforge

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace archon {

struct SourcePos {
    int line = 0;
    int col = 0;
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Syntax or early structural error while reading a model or property file.
class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& what)
        : Error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + what),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

// Property references that cannot be resolved against an architecture.
class BindError : public Error {
public:
    using Error::Error;
};

// State-space or product bound exceeded; never silently truncated.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class CodegenError : public Error {
public:
    using Error::Error;
};

// Raised when a transition fire is not allowed in the current state.
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

enum class Severity { Warning, Error };

struct Finding {
    Severity severity = Severity::Error;
    SourcePos pos;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const {
        for (const auto& f : findings)
            if (f.severity == Severity::Error) return false;
        return true;
    }
    bool empty() const { return findings.empty(); }
};

// Stable order for reports: by location, then message bytes.
void sort_findings(std::vector<Finding>& findings);

std::string format_findings(const std::vector<Finding>& findings);

}  // namespace archon

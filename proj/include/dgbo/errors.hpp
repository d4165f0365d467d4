#ifndef DGBO_ERRORS_HPP
#define DGBO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dgbo {

// All library failures derive from Error so callers (the CLI in particular)
// can serialize them uniformly. The kind() tag is what lands in reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& w) : Error("argument", w) {}
};

struct InvariantError : Error {
    explicit InvariantError(const std::string& w) : Error("invariant", w) {}
};

struct PrecisionError : Error {
    explicit PrecisionError(const std::string& w) : Error("precision", w) {}
};

struct ProfileError : Error {
    explicit ProfileError(const std::string& w) : Error("profile", w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error("numerical", w) {}
};

struct ConditioningError : Error {
    ConditioningError(const std::string& w, double cond)
        : Error("conditioning", w), condition(cond) {}
    double condition;
};

struct BlowUpError : Error {
    BlowUpError(const std::string& w, double t)
        : Error("blow_up", w), time_reached(t) {}
    double time_reached;
};

struct ConfigError : Error {
    ConfigError(const std::string& key, const std::string& w)
        : Error("config", key + ": " + w), key(key) {}
    std::string key;
};

} // namespace dgbo

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace deckwalk {

// Invalid arguments: violated preconditions, malformed decks, hypotheses.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Request exceeds a configured work budget (e.g. exact-rational term count).
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its requested accuracy.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace deckwalk

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "archon/model.hpp"

namespace archon {

// e: regular (precondition), r: required, f: fail.
enum class PscKind { Regular, Required, Fail };

struct PscEvent {
    std::string label;
    std::string from;
    std::string to;
    SourcePos pos;
};

// Constraint on the interval before a message: either an explicit set or a
// wildcard standing for every architecture message except the expected one.
struct UnwantedSet {
    bool wildcard = false;
    std::vector<PscEvent> messages;

    bool empty() const { return !wildcard && messages.empty(); }
};

struct PscMessage {
    PscKind kind = PscKind::Regular;
    PscEvent event;
    UnwantedSet unwanted;
};

// Shape: a possibly empty prefix of regular messages followed by either one
// or more required messages or exactly one fail message.
struct PscProperty {
    std::string name;
    std::vector<PscMessage> messages;
    SourcePos pos;

    bool is_fail() const;
    std::vector<PscMessage> precondition() const;
    std::vector<PscMessage> continuation() const;
};

bool operator==(const PscEvent& a, const PscEvent& b);
bool operator==(const UnwantedSet& a, const UnwantedSet& b);
bool operator==(const PscMessage& a, const PscMessage& b);
bool operator==(const PscProperty& a, const PscProperty& b);

// Parses a property file (one or more properties). Throws ParseError on
// syntax errors and shape violations.
std::vector<PscProperty> parse_properties(const std::string& text);

std::string pretty_print(const std::vector<PscProperty>& props);

// Structured-sentence library for building property messages.
enum class Panel { Mandatory, Forbidden, Optional };

struct SentencePattern {
    std::string id;  // S1..S5
    Panel panel = Panel::Optional;
    std::string text;
};

// All patterns, panel-major: the same five sentence shapes are offered in
// each panel.
std::vector<SentencePattern> sentence_patterns();

// S4/S5 constrain the interval after the message; that interval belongs to
// the next message, so the constraint is handed back for the caller to
// place.
struct InstantiatedSentence {
    PscMessage message;
    std::optional<UnwantedSet> successor_constraint;
};

// Builds a message from sentence `id` (S1..S5). `constraint` must be
// supplied exactly for the sentences with a set hole (S3, S5).
InstantiatedSentence instantiate_sentence(const std::string& id, const PscMessage& stub,
                                          const std::optional<UnwantedSet>& constraint);

// A property message resolved against an architecture.
struct MsgRef {
    std::string label;
    int channel = -1;

    bool operator==(const MsgRef& o) const { return label == o.label && channel == o.channel; }
    bool operator<(const MsgRef& o) const {
        return channel != o.channel ? channel < o.channel : label < o.label;
    }
};

struct BoundMessage {
    PscKind kind = PscKind::Regular;
    MsgRef msg;
    std::vector<MsgRef> unwanted;  // deduplicated, resolution order
};

struct BoundProperty {
    std::string name;
    bool fail_kind = false;
    std::vector<BoundMessage> precondition;
    std::vector<BoundMessage> continuation;  // r-chain, or the single f message
};

struct BindResult {
    BoundProperty property;
    std::vector<Finding> warnings;  // messages never exchanged by the machines
};

// Resolves a property against an architecture. Throws BindError when a
// component is unknown, no channel connects sender to receiver, or the fail
// message equals the first precondition message.
BindResult bind(const PscProperty& prop, const Architecture& arch);

}  // namespace archon

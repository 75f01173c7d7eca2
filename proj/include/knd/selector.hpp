#ifndef KND_SELECTOR_HPP
#define KND_SELECTOR_HPP

#include <memory>
#include <string>
#include <variant>

#include "knd/topology.hpp"

namespace knd {

// Boolean expression language over one device's attributes, a small CEL
// subset. Grammar (whitespace insignificant, "&&" binds tighter than "||"):
//
//   expr      := or_expr
//   or_expr   := and_expr { "||" and_expr }
//   and_expr  := unary { "&&" unary }
//   unary     := "!" unary | primary
//   primary   := "(" expr ")" | comparison | kind_test
//   comparison:= operand cmp_op operand
//   cmp_op    := "==" | "!=" | "<" | "<=" | ">" | ">="
//   operand   := attr_ref | literal
//   attr_ref  := "device" "." "attributes" "[" string_lit "]"
//   kind_test := "device" "." "kind" "==" string_lit       ("gpu" | "nic")
//   literal   := string_lit | int_lit | "true" | "false"
//
// The parser additionally accepts a bare identifier as operand sugar for
// device.attributes["<ident>"]; format() always emits the long form.

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or };

const char* compare_op_name(CompareOp op);
const char* logic_op_name(LogicOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LiteralNode {
    AttributeValue value;
};
struct AttributeRefNode {
    std::string key;
};
struct CompareNode {
    CompareOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct LogicNode {
    LogicOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct NotNode {
    ExprPtr child;
};
struct KindIsNode {
    DeviceKind kind;
};

struct Expr {
    std::variant<LiteralNode, AttributeRefNode, CompareNode, LogicNode, NotNode, KindIsNode> node;
};

// Immutable expression tree; copies share structure.
class SelectorAst {
public:
    SelectorAst() = default;
    explicit SelectorAst(ExprPtr root) : root_(std::move(root)) {}

    const ExprPtr& root() const { return root_; }
    bool empty() const { return root_ == nullptr; }

    static SelectorAst literal(AttributeValue v);
    static SelectorAst attribute(std::string key);
    static SelectorAst compare(CompareOp op, SelectorAst lhs, SelectorAst rhs);
    static SelectorAst logic(LogicOp op, SelectorAst lhs, SelectorAst rhs);
    static SelectorAst negate(SelectorAst child);
    static SelectorAst kind_is(DeviceKind kind);

    friend bool operator==(const SelectorAst& a, const SelectorAst& b);
    friend bool operator!=(const SelectorAst& a, const SelectorAst& b) { return !(a == b); }

private:
    ExprPtr root_;
};

enum class EvalFault { AttributeMissing, TypeMismatch };

// Boolean result or an in-band fault; faults never escape as exceptions.
struct EvalOutcome {
    static EvalOutcome of(bool v) { return EvalOutcome{v, false, EvalFault::AttributeMissing, {}}; }
    static EvalOutcome missing(std::string key) {
        return EvalOutcome{false, true, EvalFault::AttributeMissing, std::move(key)};
    }
    static EvalOutcome mismatch(std::string detail) {
        return EvalOutcome{false, true, EvalFault::TypeMismatch, std::move(detail)};
    }

    bool is_fault() const { return fault; }
    bool is_value() const { return !fault; }

    bool value = false;
    bool fault = false;
    EvalFault fault_kind = EvalFault::AttributeMissing;
    std::string fault_detail; // offending attribute key or operator

    friend bool operator==(const EvalOutcome& a, const EvalOutcome& b) {
        if (a.fault != b.fault) return false;
        if (a.fault) return a.fault_kind == b.fault_kind && a.fault_detail == b.fault_detail;
        return a.value == b.value;
    }
};

std::string eval_outcome_to_string(const EvalOutcome& o);

// Rejects anything outside the grammar with a ParseError carrying the byte offset.
SelectorAst parse_selector(const std::string& text);

// Standard boolean semantics; comparisons need matching variants, ordering is
// integer-only, && and || short-circuit left-to-right and a short-circuited
// right operand's faults are suppressed.
EvalOutcome evaluate(const SelectorAst& ast, const DeviceDescriptor& device);

// Canonical text: parse(format(ast)) is structurally equal to ast, and
// format(parse(format(ast))) == format(ast). Logic nodes are parenthesized.
std::string format_selector(const SelectorAst& ast);

} // namespace knd

#endif // KND_SELECTOR_HPP

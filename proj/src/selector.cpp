#include "knd/selector.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <utility>

#include "knd/errors.hpp"

namespace knd {

const char* compare_op_name(CompareOp op) {
    switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    }
    return "?";
}

const char* logic_op_name(LogicOp op) {
    return op == LogicOp::And ? "&&" : "||";
}

SelectorAst SelectorAst::literal(AttributeValue v) {
    return SelectorAst(std::make_shared<const Expr>(Expr{LiteralNode{std::move(v)}}));
}
SelectorAst SelectorAst::attribute(std::string key) {
    return SelectorAst(std::make_shared<const Expr>(Expr{AttributeRefNode{std::move(key)}}));
}
SelectorAst SelectorAst::compare(CompareOp op, SelectorAst lhs, SelectorAst rhs) {
    return SelectorAst(std::make_shared<const Expr>(Expr{CompareNode{op, lhs.root(), rhs.root()}}));
}
SelectorAst SelectorAst::logic(LogicOp op, SelectorAst lhs, SelectorAst rhs) {
    return SelectorAst(std::make_shared<const Expr>(Expr{LogicNode{op, lhs.root(), rhs.root()}}));
}
SelectorAst SelectorAst::negate(SelectorAst child) {
    return SelectorAst(std::make_shared<const Expr>(Expr{NotNode{child.root()}}));
}
SelectorAst SelectorAst::kind_is(DeviceKind kind) {
    return SelectorAst(std::make_shared<const Expr>(Expr{KindIsNode{kind}}));
}

namespace {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->node.index() != b->node.index()) return false;
    if (const auto* la = std::get_if<LiteralNode>(&a->node)) {
        return la->value == std::get<LiteralNode>(b->node).value;
    }
    if (const auto* ra = std::get_if<AttributeRefNode>(&a->node)) {
        return ra->key == std::get<AttributeRefNode>(b->node).key;
    }
    if (const auto* ca = std::get_if<CompareNode>(&a->node)) {
        const auto& cb = std::get<CompareNode>(b->node);
        return ca->op == cb.op && expr_equal(ca->lhs, cb.lhs) && expr_equal(ca->rhs, cb.rhs);
    }
    if (const auto* ga = std::get_if<LogicNode>(&a->node)) {
        const auto& gb = std::get<LogicNode>(b->node);
        return ga->op == gb.op && expr_equal(ga->lhs, gb.lhs) && expr_equal(ga->rhs, gb.rhs);
    }
    if (const auto* na = std::get_if<NotNode>(&a->node)) {
        return expr_equal(na->child, std::get<NotNode>(b->node).child);
    }
    return std::get<KindIsNode>(a->node).kind == std::get<KindIsNode>(b->node).kind;
}

} // namespace

bool operator==(const SelectorAst& a, const SelectorAst& b) {
    return expr_equal(a.root_, b.root_);
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class TokKind {
    Ident,     // device, attributes, kind, sugar identifiers
    String,
    Int,
    True,
    False,
    EqEq, NotEq, Lt, Le, Gt, Ge,
    AndAnd, OrOr, Bang,
    LParen, RParen, LBracket, RBracket, Dot,
    End,
};

struct Token {
    TokKind kind = TokKind::End;
    std::size_t offset = 0;
    std::string text;       // Ident / String payload
    std::int64_t int_value = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ >= text_.size()) {
            return Token{TokKind::End, at, {}, 0};
        }
        const char c = text_[pos_];
        if (c == '(') { ++pos_; return Token{TokKind::LParen, at, {}, 0}; }
        if (c == ')') { ++pos_; return Token{TokKind::RParen, at, {}, 0}; }
        if (c == '[') { ++pos_; return Token{TokKind::LBracket, at, {}, 0}; }
        if (c == ']') { ++pos_; return Token{TokKind::RBracket, at, {}, 0}; }
        if (c == '.') { ++pos_; return Token{TokKind::Dot, at, {}, 0}; }
        if (c == '=') {
            if (peek(1) == '=') { pos_ += 2; return Token{TokKind::EqEq, at, {}, 0}; }
            throw ParseError("unknown token '='", at);
        }
        if (c == '!') {
            if (peek(1) == '=') { pos_ += 2; return Token{TokKind::NotEq, at, {}, 0}; }
            ++pos_;
            return Token{TokKind::Bang, at, {}, 0};
        }
        if (c == '<') {
            if (peek(1) == '=') { pos_ += 2; return Token{TokKind::Le, at, {}, 0}; }
            ++pos_;
            return Token{TokKind::Lt, at, {}, 0};
        }
        if (c == '>') {
            if (peek(1) == '=') { pos_ += 2; return Token{TokKind::Ge, at, {}, 0}; }
            ++pos_;
            return Token{TokKind::Gt, at, {}, 0};
        }
        if (c == '&') {
            if (peek(1) == '&') { pos_ += 2; return Token{TokKind::AndAnd, at, {}, 0}; }
            throw ParseError("unknown token '&'", at);
        }
        if (c == '|') {
            if (peek(1) == '|') { pos_ += 2; return Token{TokKind::OrOr, at, {}, 0}; }
            throw ParseError("unknown token '|'", at);
        }
        if (c == '"') {
            return lex_string(at);
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            return lex_int(at);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            std::string word = text_.substr(pos_, end - pos_);
            pos_ = end;
            if (word == "true") return Token{TokKind::True, at, {}, 0};
            if (word == "false") return Token{TokKind::False, at, {}, 0};
            return Token{TokKind::Ident, at, std::move(word), 0};
        }
        throw ParseError(std::string("unknown token '") + c + "'", at);
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    Token lex_string(std::size_t at) {
        ++pos_; // opening quote
        std::string value;
        while (true) {
            if (pos_ >= text_.size()) {
                throw ParseError("unterminated string literal", at);
            }
            const char c = text_[pos_];
            if (c == '"') {
                ++pos_;
                return Token{TokKind::String, at, std::move(value), 0};
            }
            if (c == '\\') {
                const char esc = peek(1);
                if (esc != '"' && esc != '\\') {
                    throw ParseError("unsupported escape sequence", pos_);
                }
                value.push_back(esc);
                pos_ += 2;
                continue;
            }
            value.push_back(c);
            ++pos_;
        }
    }

    Token lex_int(std::size_t at) {
        std::size_t end = pos_;
        if (text_[end] == '-') ++end;
        const std::size_t digits_begin = end;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
            ++end;
        }
        if (digits_begin == end) {
            throw ParseError("unknown token '-'", at);
        }
        std::int64_t value = 0;
        const auto res = std::from_chars(text_.data() + pos_, text_.data() + end, value);
        if (res.ec != std::errc()) {
            throw ParseError("integer literal out of range", at);
        }
        pos_ = end;
        return Token{TokKind::Int, at, {}, value};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { advance(); }

    SelectorAst parse() {
        SelectorAst ast = parse_or();
        if (cur_.kind != TokKind::End) {
            throw ParseError("unexpected trailing input", cur_.offset);
        }
        return ast;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    void expect(TokKind kind, const char* what) {
        if (cur_.kind != kind) {
            throw ParseError(std::string("expected ") + what, cur_.offset);
        }
        advance();
    }

    SelectorAst parse_or() {
        SelectorAst lhs = parse_and();
        while (cur_.kind == TokKind::OrOr) {
            advance();
            lhs = SelectorAst::logic(LogicOp::Or, std::move(lhs), parse_and());
        }
        return lhs;
    }

    SelectorAst parse_and() {
        SelectorAst lhs = parse_unary();
        while (cur_.kind == TokKind::AndAnd) {
            advance();
            lhs = SelectorAst::logic(LogicOp::And, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    SelectorAst parse_unary() {
        if (cur_.kind == TokKind::Bang) {
            advance();
            return SelectorAst::negate(parse_unary());
        }
        return parse_primary();
    }

    SelectorAst parse_primary() {
        if (cur_.kind == TokKind::LParen) {
            advance();
            SelectorAst inner = parse_or();
            expect(TokKind::RParen, "')'");
            return inner;
        }
        if (cur_.kind == TokKind::Ident && cur_.text == "device") {
            // Either a kind test or an attribute comparison.
            const std::size_t device_at = cur_.offset;
            advance();
            expect(TokKind::Dot, "'.'");
            if (cur_.kind != TokKind::Ident) {
                throw ParseError("expected 'attributes' or 'kind' after 'device.'", cur_.offset);
            }
            if (cur_.text == "kind") {
                advance();
                expect(TokKind::EqEq, "'==' after 'device.kind'");
                if (cur_.kind != TokKind::String) {
                    throw ParseError("expected device kind string", cur_.offset);
                }
                DeviceKind kind;
                if (cur_.text == "gpu") {
                    kind = DeviceKind::Gpu;
                } else if (cur_.text == "nic") {
                    kind = DeviceKind::Nic;
                } else {
                    throw ParseError("unknown device kind '" + cur_.text + "'", cur_.offset);
                }
                advance();
                return SelectorAst::kind_is(kind);
            }
            if (cur_.text == "attributes") {
                SelectorAst lhs = parse_attr_ref_tail();
                return parse_comparison_tail(std::move(lhs));
            }
            throw ParseError("expected 'attributes' or 'kind' after 'device.'", device_at);
        }
        return parse_comparison_tail(parse_operand());
    }

    // Caller consumed "device" "."; current token is "attributes".
    SelectorAst parse_attr_ref_tail() {
        advance(); // attributes
        expect(TokKind::LBracket, "'['");
        if (cur_.kind != TokKind::String) {
            throw ParseError("expected attribute key string", cur_.offset);
        }
        std::string key = cur_.text;
        advance();
        expect(TokKind::RBracket, "']'");
        return SelectorAst::attribute(std::move(key));
    }

    SelectorAst parse_comparison_tail(SelectorAst lhs) {
        CompareOp op;
        switch (cur_.kind) {
        case TokKind::EqEq: op = CompareOp::Eq; break;
        case TokKind::NotEq: op = CompareOp::Ne; break;
        case TokKind::Lt: op = CompareOp::Lt; break;
        case TokKind::Le: op = CompareOp::Le; break;
        case TokKind::Gt: op = CompareOp::Gt; break;
        case TokKind::Ge: op = CompareOp::Ge; break;
        default:
            throw ParseError("expected comparison operator", cur_.offset);
        }
        advance();
        return SelectorAst::compare(op, std::move(lhs), parse_operand());
    }

    SelectorAst parse_operand() {
        switch (cur_.kind) {
        case TokKind::String: {
            std::string v = cur_.text;
            const std::size_t at = cur_.offset;
            advance();
            if (v.empty()) {
                throw ParseError("empty string literal", at);
            }
            return SelectorAst::literal(AttributeValue::text(std::move(v)));
        }
        case TokKind::Int: {
            SelectorAst v = SelectorAst::literal(AttributeValue::integer(cur_.int_value));
            advance();
            return v;
        }
        case TokKind::True:
            advance();
            return SelectorAst::literal(AttributeValue::flag(true));
        case TokKind::False:
            advance();
            return SelectorAst::literal(AttributeValue::flag(false));
        case TokKind::Ident: {
            if (cur_.text == "device") {
                advance();
                expect(TokKind::Dot, "'.'");
                if (cur_.kind != TokKind::Ident || cur_.text != "attributes") {
                    throw ParseError("expected 'attributes' after 'device.'", cur_.offset);
                }
                return parse_attr_ref_tail();
            }
            // Bare-identifier sugar: a == device.attributes["a"].
            std::string key = cur_.text;
            advance();
            return SelectorAst::attribute(std::move(key));
        }
        default:
            throw ParseError("expected operand", cur_.offset);
        }
    }

    Lexer lexer_;
    Token cur_;
};

} // namespace

SelectorAst parse_selector(const std::string& text) {
    return Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Intermediate result: an attribute value (booleans are Flag) or a fault.
struct Value {
    static Value of(AttributeValue v) { return Value{std::move(v), {}}; }
    static Value of_fault(EvalOutcome f) { return Value{std::nullopt, std::move(f)}; }
    static Value of_bool(bool b) { return of(AttributeValue::flag(b)); }

    bool is_fault() const { return fault.has_value(); }

    std::optional<AttributeValue> attr;
    std::optional<EvalOutcome> fault;
};

Value eval_expr(const ExprPtr& e, const DeviceDescriptor& device);

Value eval_compare(const CompareNode& c, const DeviceDescriptor& device) {
    Value lhs = eval_expr(c.lhs, device);
    if (lhs.is_fault()) return lhs;
    Value rhs = eval_expr(c.rhs, device);
    if (rhs.is_fault()) return rhs;
    const AttributeValue& a = *lhs.attr;
    const AttributeValue& b = *rhs.attr;
    if (a.kind() != b.kind()) {
        return Value::of_fault(EvalOutcome::mismatch(
            std::string("'") + compare_op_name(c.op) + "' on " + attribute_kind_name(a.kind()) +
            " vs " + attribute_kind_name(b.kind())));
    }
    switch (c.op) {
    case CompareOp::Eq:
        return Value::of_bool(a == b);
    case CompareOp::Ne:
        return Value::of_bool(a != b);
    default:
        break;
    }
    if (!a.is_integer()) {
        return Value::of_fault(EvalOutcome::mismatch(
            std::string("'") + compare_op_name(c.op) + "' on " + attribute_kind_name(a.kind())));
    }
    const std::int64_t x = a.as_integer();
    const std::int64_t y = b.as_integer();
    switch (c.op) {
    case CompareOp::Lt: return Value::of_bool(x < y);
    case CompareOp::Le: return Value::of_bool(x <= y);
    case CompareOp::Gt: return Value::of_bool(x > y);
    case CompareOp::Ge: return Value::of_bool(x >= y);
    default: return Value::of_bool(false); // unreachable
    }
}

Value require_flag(Value v, const char* op) {
    if (v.is_fault()) return v;
    if (!v.attr->is_flag()) {
        return Value::of_fault(EvalOutcome::mismatch(
            std::string("'") + op + "' on " + attribute_kind_name(v.attr->kind())));
    }
    return v;
}

Value eval_logic(const LogicNode& g, const DeviceDescriptor& device) {
    const char* op = logic_op_name(g.op);
    Value lhs = require_flag(eval_expr(g.lhs, device), op);
    if (lhs.is_fault()) return lhs;
    const bool l = lhs.attr->as_flag();
    // Short-circuit: the unevaluated right operand's faults are suppressed.
    if (g.op == LogicOp::And && !l) return Value::of_bool(false);
    if (g.op == LogicOp::Or && l) return Value::of_bool(true);
    Value rhs = require_flag(eval_expr(g.rhs, device), op);
    if (rhs.is_fault()) return rhs;
    return Value::of_bool(rhs.attr->as_flag());
}

Value eval_expr(const ExprPtr& e, const DeviceDescriptor& device) {
    if (const auto* lit = std::get_if<LiteralNode>(&e->node)) {
        return Value::of(lit->value);
    }
    if (const auto* ref = std::get_if<AttributeRefNode>(&e->node)) {
        const AttributeValue* v = device.find_attribute(ref->key);
        if (v == nullptr) {
            return Value::of_fault(EvalOutcome::missing(ref->key));
        }
        return Value::of(*v);
    }
    if (const auto* cmp = std::get_if<CompareNode>(&e->node)) {
        return eval_compare(*cmp, device);
    }
    if (const auto* logic = std::get_if<LogicNode>(&e->node)) {
        return eval_logic(*logic, device);
    }
    if (const auto* neg = std::get_if<NotNode>(&e->node)) {
        Value child = require_flag(eval_expr(neg->child, device), "!");
        if (child.is_fault()) return child;
        return Value::of_bool(!child.attr->as_flag());
    }
    const auto& kind = std::get<KindIsNode>(e->node);
    return Value::of_bool(device.kind() == kind.kind);
}

} // namespace

EvalOutcome evaluate(const SelectorAst& ast, const DeviceDescriptor& device) {
    if (ast.empty()) {
        return EvalOutcome::mismatch("empty expression");
    }
    Value v = eval_expr(ast.root(), device);
    if (v.is_fault()) return *v.fault;
    if (!v.attr->is_flag()) {
        return EvalOutcome::mismatch(std::string("expression yields ") +
                                     attribute_kind_name(v.attr->kind()) + ", not flag");
    }
    return EvalOutcome::of(v.attr->as_flag());
}

std::string eval_outcome_to_string(const EvalOutcome& o) {
    if (!o.fault) {
        return o.value ? "true" : "false";
    }
    if (o.fault_kind == EvalFault::AttributeMissing) {
        return "AttributeMissing:" + o.fault_detail;
    }
    return "TypeMismatch:" + o.fault_detail;
}

// ---------------------------------------------------------------------------
// Canonical formatting
// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void format_expr(const ExprPtr& e, std::string& out) {
    if (const auto* lit = std::get_if<LiteralNode>(&e->node)) {
        switch (lit->value.kind()) {
        case AttributeValue::Kind::Text:
            out += quote(lit->value.as_text());
            return;
        case AttributeValue::Kind::Integer:
            out += std::to_string(lit->value.as_integer());
            return;
        case AttributeValue::Kind::Flag:
            out += lit->value.as_flag() ? "true" : "false";
            return;
        }
    }
    if (const auto* ref = std::get_if<AttributeRefNode>(&e->node)) {
        out += "device.attributes[";
        out += quote(ref->key);
        out += "]";
        return;
    }
    if (const auto* cmp = std::get_if<CompareNode>(&e->node)) {
        format_expr(cmp->lhs, out);
        out += " ";
        out += compare_op_name(cmp->op);
        out += " ";
        format_expr(cmp->rhs, out);
        return;
    }
    if (const auto* logic = std::get_if<LogicNode>(&e->node)) {
        out += "(";
        format_expr(logic->lhs, out);
        out += " ";
        out += logic_op_name(logic->op);
        out += " ";
        format_expr(logic->rhs, out);
        out += ")";
        return;
    }
    if (const auto* neg = std::get_if<NotNode>(&e->node)) {
        // Logic children parenthesize themselves.
        if (std::holds_alternative<LogicNode>(neg->child->node)) {
            out += "!";
            format_expr(neg->child, out);
        } else {
            out += "!(";
            format_expr(neg->child, out);
            out += ")";
        }
        return;
    }
    const auto& kind = std::get<KindIsNode>(e->node);
    out += "device.kind == ";
    out += quote(device_kind_name(kind.kind));
}

} // namespace

std::string format_selector(const SelectorAst& ast) {
    if (ast.empty()) return "";
    std::string out;
    format_expr(ast.root(), out);
    return out;
}

} // namespace knd

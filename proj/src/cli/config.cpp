#include "stochcert/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace stochcert {

namespace {

// Parsed TOML-subset value.
struct Value {
    enum class Kind { String, Number, Array } kind = Kind::String;
    std::string text; // string contents or the number literal
    std::vector<Value> items;
    int line = 0;
};

class Reader {
public:
    Reader(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

    [[noreturn]] void fail(const std::string& msg, int line) const
    {
        throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, line_); }

    // Fills entries keyed "section.key" (top-level keys have an empty section).
    void read(std::map<std::string, Value>& entries)
    {
        std::string section;
        while (true) {
            skip_blank_lines();
            if (pos_ >= text_.size())
                return;
            char c = text_[pos_];
            if (c == '[') {
                ++pos_;
                skip_inline_space();
                section = bare_key();
                skip_inline_space();
                if (peek() != ']')
                    fail("expected ']' after section name");
                ++pos_;
                end_of_line();
                continue;
            }
            int line = line_;
            std::string key = bare_key();
            skip_inline_space();
            if (peek() != '=')
                fail("expected '=' after key '" + key + "'");
            ++pos_;
            skip_inline_space();
            Value v = value();
            v.line = line;
            end_of_line();
            std::string full = section.empty() ? key : section + "." + key;
            if (!entries.emplace(full, std::move(v)).second)
                fail("duplicate key '" + key + "'", line);
        }
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_inline_space()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
            ++pos_;
    }

    void skip_comment()
    {
        if (peek() == '#')
            while (pos_ < text_.size() && text_[pos_] != '\n')
                ++pos_;
    }

    // Whitespace, newlines and comments.
    void skip_blank_lines()
    {
        while (true) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n')
                return;
            ++pos_;
            ++line_;
        }
    }

    void end_of_line()
    {
        skip_inline_space();
        skip_comment();
        if (pos_ < text_.size() && text_[pos_] != '\n')
            fail("unexpected text after value");
    }

    std::string bare_key()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'
                                       || text_[pos_] == '-'))
            ++pos_;
        if (start == pos_)
            fail("expected a key");
        return text_.substr(start, pos_ - start);
    }

    Value value()
    {
        Value v;
        v.line = line_;
        char c = peek();
        if (c == '"' || c == '\'') {
            v.kind = Value::Kind::String;
            v.text = quoted(c);
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            ++pos_;
            while (true) {
                skip_blank_lines();
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                v.items.push_back(value());
                skip_blank_lines();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
        } else {
            v.kind = Value::Kind::Number;
            std::size_t start = pos_;
            while (pos_ < text_.size()
                   && (std::isalnum(static_cast<unsigned char>(text_[pos_]))
                       || std::string_view("+-._").find(text_[pos_]) != std::string_view::npos))
                ++pos_;
            v.text = text_.substr(start, pos_ - start);
            if (v.text.empty())
                fail("expected a value");
        }
        return v;
    }

    std::string quoted(char quote)
    {
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                fail("unterminated string");
            char c = text_[pos_++];
            if (c == quote)
                return out;
            if (c == '\\' && quote == '"') {
                char e = peek();
                ++pos_;
                switch (e) {
                case '"':
                case '\\':
                    out += e;
                    break;
                case 'n':
                    out += '\n';
                    break;
                case 't':
                    out += '\t';
                    break;
                default:
                    fail(std::string("unsupported escape \\") + e);
                }
                continue;
            }
            out += c;
        }
    }

    const std::string& text_;
    const std::string& origin_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

// Typed access to the collected entries with file/line errors.
class Entries {
public:
    Entries(std::map<std::string, Value> entries, const std::string& origin)
        : entries_(std::move(entries)), origin_(origin)
    {
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        auto it = entries_.find(key);
        std::string where = it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
        throw ConfigError(where + ": " + msg);
    }

    const Value* find(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return nullptr;
        used_.insert(key);
        return &it->second;
    }

    const Value& require(const std::string& key)
    {
        const Value* v = find(key);
        if (!v)
            throw ConfigError(origin_ + ": missing key '" + key + "'");
        return *v;
    }

    std::string string(const std::string& key, const Value& v)
    {
        if (v.kind != Value::Kind::String)
            fail(key, "'" + key + "' must be a string");
        return v.text;
    }

    double number(const std::string& key, const Value& v)
    {
        if (v.kind != Value::Kind::Number)
            fail(key, "'" + key + "' must be a number");
        errno = 0;
        char* end = nullptr;
        double d = std::strtod(v.text.c_str(), &end);
        if (end != v.text.c_str() + v.text.size() || errno == ERANGE || !std::isfinite(d))
            fail(key, "'" + key + "' is not a valid number: " + v.text);
        return d;
    }

    std::int64_t integer(const std::string& key, const Value& v)
    {
        double d = number(key, v);
        if (d != std::floor(d) || std::fabs(d) > 9.0e15)
            fail(key, "'" + key + "' must be an integer");
        return static_cast<std::int64_t>(d);
    }

    std::uint64_t unsigned_integer(const std::string& key, const Value& v)
    {
        if (v.kind != Value::Kind::Number || v.text.empty() || v.text[0] == '-')
            fail(key, "'" + key + "' must be a non-negative integer");
        errno = 0;
        char* end = nullptr;
        unsigned long long u = std::strtoull(v.text.c_str(), &end, 10);
        if (end != v.text.c_str() + v.text.size() || errno == ERANGE)
            fail(key, "'" + key + "' must be a non-negative integer");
        return u;
    }

    // A number, or a string holding a rational like "2/3".
    Number exact_number(const std::string& key, const Value& v)
    {
        if (v.kind == Value::Kind::Number) {
            double d = number(key, v);
            if (auto r = rational_from_decimal(v.text))
                return Number::tagged(d, *r);
            return Number(d);
        }
        if (v.kind == Value::Kind::String) {
            try {
                Expr e = parse(v.text, 1);
                if (e.is_constant())
                    return e.value();
            } catch (const ParseError&) {
            }
        }
        fail(key, "'" + key + "' must be a number or a constant such as \"2/3\"");
    }

    std::vector<std::string> strings(const std::string& key, const Value& v)
    {
        if (v.kind != Value::Kind::Array)
            fail(key, "'" + key + "' must be an array of strings");
        std::vector<std::string> out;
        for (const auto& item : v.items)
            out.push_back(string(key, item));
        return out;
    }

    std::vector<double> numbers(const std::string& key, const Value& v)
    {
        if (v.kind != Value::Kind::Array)
            fail(key, "'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& item : v.items)
            out.push_back(number(key, item));
        return out;
    }

    void reject_unused()
    {
        for (const auto& [key, v] : entries_)
            if (!used_.count(key))
                fail(key, "unknown key '" + key + "'");
    }

private:
    std::map<std::string, Value> entries_;
    std::set<std::string> used_;
    const std::string& origin_;
};

std::string fmt(double d)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string number_literal(const Number& n)
{
    if (n.exact() && !n.exact()->is_integer())
        return quote(n.exact()->str());
    if (n.exact())
        return std::to_string(n.exact()->num());
    return fmt(n.value());
}

bool same_optional_number(const std::optional<Number>& a, const std::optional<Number>& b)
{
    if (a.has_value() != b.has_value())
        return false;
    return !a || a->same_as(*b, 0.0);
}

} // namespace

SdeModel RunConfig::model() const
{
    return make_model(name, dim, brownian_dim, drift, diffusion);
}

Expr RunConfig::v_expr() const { return parse(v, dim); }

std::optional<Expr> RunConfig::u_expr() const
{
    if (!u)
        return std::nullopt;
    return parse(*u, dim);
}

KFunction RunConfig::k() const
{
    if (k_family == "power")
        return KFunction(PowerK{gamma.value()});
    if (k_family == "powersum") {
        if (!alpha)
            throw ConfigError("K family 'powersum' needs alpha");
        return KFunction(PowerSumK{gamma.value(), alpha->value()});
    }
    throw ConfigError("unknown K family '" + k_family + "' (expected power or powersum)");
}

CertifyRequest RunConfig::certify_request() const
{
    CertifyRequest r;
    r.model = model();
    r.v = v_expr();
    r.u = u_expr();
    r.k = k();
    r.c = c;
    r.domain = domain;
    if (!x0.empty())
        r.x0 = x0;
    return r;
}

SimParams RunConfig::sim_params(double default_t_max) const
{
    SimParams p;
    p.dt = dt;
    p.t_max = t_max.value_or(default_t_max);
    p.absorb_eps = absorb_eps;
    p.output_stride = output_stride;
    return p;
}

void RunConfig::validate() const
{
    auto expr_error = [](const std::string& where, const std::string& text, const ParseError& e) {
        return ConfigError(where + ": cannot parse \"" + text + "\": " + e.what() + " (offset "
                           + std::to_string(e.offset()) + ")");
    };
    if (dim < 1 || brownian_dim < 1)
        throw ConfigError("dim and brownian_dim must be >= 1");
    if (static_cast<int>(drift.size()) != dim)
        throw ConfigError("drift needs " + std::to_string(dim) + " entries");
    if (static_cast<int>(diffusion.size()) != dim)
        throw ConfigError("diffusion needs " + std::to_string(dim) + " rows");
    for (const auto& row : diffusion)
        if (static_cast<int>(row.size()) != brownian_dim)
            throw ConfigError("each diffusion row needs " + std::to_string(brownian_dim) + " entries");
    for (int i = 0; i < dim; ++i) {
        try {
            parse(drift[i], dim);
        } catch (const ParseError& e) {
            throw expr_error("drift[" + std::to_string(i + 1) + "]", drift[i], e);
        }
        for (int j = 0; j < brownian_dim; ++j)
            try {
                parse(diffusion[i][j], dim);
            } catch (const ParseError& e) {
                throw expr_error("diffusion[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]",
                                 diffusion[i][j], e);
            }
    }
    auto issues = validate_model(model());
    if (!issues.empty())
        throw ConfigError("invalid model: " + issues.front());
    if (v.empty())
        throw ConfigError("lyapunov.V is required");
    try {
        v_expr();
    } catch (const ParseError& e) {
        throw expr_error("V", v, e);
    }
    if (u)
        try {
            u_expr();
        } catch (const ParseError& e) {
            throw expr_error("U", *u, e);
        }
    try {
        k();
        domain.validate();
        sim_params(10.0).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c && !(*c > 0.0))
        throw ConfigError("c must be positive");
    if (!x0.empty() && static_cast<int>(x0.size()) != dim)
        throw ConfigError("x0 needs " + std::to_string(dim) + " entries");
    if (n_paths < 2)
        throw ConfigError("n_paths must be >= 2");
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    std::map<std::string, Value> raw;
    Reader(text, origin).read(raw);
    Entries e(std::move(raw), origin);
    RunConfig c;

    if (auto v = e.find("name"))
        c.name = e.string("name", *v);

    c.dim = static_cast<int>(e.integer("model.dim", e.require("model.dim")));
    if (auto v = e.find("model.brownian_dim"))
        c.brownian_dim = static_cast<int>(e.integer("model.brownian_dim", *v));
    c.drift = e.strings("model.drift", e.require("model.drift"));
    const Value& diff = e.require("model.diffusion");
    if (diff.kind != Value::Kind::Array)
        e.fail("model.diffusion", "'model.diffusion' must be an array of rows");
    for (const auto& row : diff.items)
        c.diffusion.push_back(e.strings("model.diffusion", row));

    c.v = e.string("lyapunov.V", e.require("lyapunov.V"));
    if (auto v = e.find("lyapunov.U"))
        c.u = e.string("lyapunov.U", *v);

    if (auto v = e.find("certificate.K"))
        c.k_family = e.string("certificate.K", *v);
    if (auto v = e.find("certificate.gamma"))
        c.gamma = e.exact_number("certificate.gamma", *v);
    if (auto v = e.find("certificate.alpha"))
        c.alpha = e.exact_number("certificate.alpha", *v);
    if (auto v = e.find("certificate.c"))
        c.c = e.number("certificate.c", *v);
    if (auto v = e.find("certificate.r_min"))
        c.domain.r_min = e.number("certificate.r_min", *v);
    if (auto v = e.find("certificate.r_max"))
        c.domain.r_max = e.number("certificate.r_max", *v);
    if (auto v = e.find("certificate.n_levels"))
        c.domain.n_levels = static_cast<int>(e.integer("certificate.n_levels", *v));
    if (auto v = e.find("certificate.n_dirs"))
        c.domain.n_dirs = static_cast<int>(e.integer("certificate.n_dirs", *v));
    if (auto v = e.find("certificate.n_random"))
        c.domain.n_random = static_cast<int>(e.integer("certificate.n_random", *v));
    if (auto v = e.find("certificate.sample_seed"))
        c.domain.seed = e.unsigned_integer("certificate.sample_seed", *v);

    if (auto v = e.find("simulation.x0"))
        c.x0 = e.numbers("simulation.x0", *v);
    if (auto v = e.find("simulation.dt"))
        c.dt = e.number("simulation.dt", *v);
    if (auto v = e.find("simulation.t_max"))
        c.t_max = e.number("simulation.t_max", *v);
    if (auto v = e.find("simulation.absorb_eps"))
        c.absorb_eps = e.number("simulation.absorb_eps", *v);
    if (auto v = e.find("simulation.output_stride"))
        c.output_stride = static_cast<int>(e.integer("simulation.output_stride", *v));
    if (auto v = e.find("simulation.n_paths"))
        c.n_paths = static_cast<int>(e.integer("simulation.n_paths", *v));
    if (auto v = e.find("simulation.seed"))
        c.seed = e.unsigned_integer("simulation.seed", *v);

    e.reject_unused();
    try {
        c.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(origin + ": " + err.what());
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string dump_config(const RunConfig& c)
{
    std::ostringstream out;
    out << "name = " << quote(c.name) << "\n\n[model]\n";
    out << "dim = " << c.dim << "\nbrownian_dim = " << c.brownian_dim << "\ndrift = [";
    for (std::size_t i = 0; i < c.drift.size(); ++i)
        out << (i ? ", " : "") << quote(c.drift[i]);
    out << "]\ndiffusion = [\n";
    for (const auto& row : c.diffusion) {
        out << "  [";
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? ", " : "") << quote(row[j]);
        out << "],\n";
    }
    out << "]\n\n[lyapunov]\nV = " << quote(c.v) << "\n";
    if (c.u)
        out << "U = " << quote(*c.u) << "\n";
    out << "\n[certificate]\nK = " << quote(c.k_family) << "\ngamma = " << number_literal(c.gamma) << "\n";
    if (c.alpha)
        out << "alpha = " << number_literal(*c.alpha) << "\n";
    if (c.c)
        out << "c = " << fmt(*c.c) << "\n";
    out << "r_min = " << fmt(c.domain.r_min) << "\nr_max = " << fmt(c.domain.r_max) << "\nn_levels = "
        << c.domain.n_levels << "\nn_dirs = " << c.domain.n_dirs << "\nn_random = " << c.domain.n_random
        << "\nsample_seed = " << c.domain.seed << "\n\n[simulation]\n";
    if (!c.x0.empty()) {
        out << "x0 = [";
        for (std::size_t i = 0; i < c.x0.size(); ++i)
            out << (i ? ", " : "") << fmt(c.x0[i]);
        out << "]\n";
    }
    out << "dt = " << fmt(c.dt) << "\n";
    if (c.t_max)
        out << "t_max = " << fmt(*c.t_max) << "\n";
    out << "absorb_eps = " << fmt(c.absorb_eps) << "\noutput_stride = " << c.output_stride
        << "\nn_paths = " << c.n_paths << "\nseed = " << c.seed << "\n";
    return out.str();
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    auto same_domain = [](const SampleDomain& x, const SampleDomain& y) {
        return x.r_min == y.r_min && x.r_max == y.r_max && x.n_levels == y.n_levels && x.n_dirs == y.n_dirs
               && x.n_random == y.n_random && x.seed == y.seed;
    };
    return a.name == b.name && a.dim == b.dim && a.brownian_dim == b.brownian_dim && a.drift == b.drift
           && a.diffusion == b.diffusion && a.v == b.v && a.u == b.u && a.k_family == b.k_family
           && a.gamma.same_as(b.gamma, 0.0) && same_optional_number(a.alpha, b.alpha) && a.c == b.c
           && same_domain(a.domain, b.domain) && a.x0 == b.x0 && a.dt == b.dt && a.t_max == b.t_max
           && a.absorb_eps == b.absorb_eps && a.output_stride == b.output_stride && a.n_paths == b.n_paths
           && a.seed == b.seed;
}

} // namespace stochcert

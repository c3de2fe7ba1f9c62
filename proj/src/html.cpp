#include "atelier/html.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "atelier/error.hpp"
#include "atelier/text.hpp"

namespace atelier::html {

namespace {

const std::unordered_set<std::string_view> kVoidElements = {"area",  "base", "br",   "col",   "embed",
                                                             "hr",    "img",  "input", "link", "meta",
                                                             "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset", "figure", "footer", "form",
    "h1",      "h2",      "h3",    "h4",         "h5",  "h6", "header",   "hr",     "main",   "nav",
    "ol",      "p",       "pre",   "section",    "table", "ul"};

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.';
}

bool starts_with_icase(std::string_view s, std::size_t pos, std::string_view prefix) {
    return s.size() - pos >= prefix.size() && text::iequals(s.substr(pos, prefix.size()), prefix);
}

class TreeBuilder {
public:
    explicit TreeBuilder(Node& root) { stack_.push_back(&root); }

    void text(std::string decoded) {
        if (decoded.empty()) return;
        Node* top = stack_.back();
        if (!top->children.empty() && top->children.back()->kind == Node::Kind::text) {
            top->children.back()->text += decoded;
            return;
        }
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::text;
        node->text = std::move(decoded);
        node->parent = top;
        top->children.push_back(std::move(node));
    }

    void start_tag(std::string tag, std::vector<std::pair<std::string, std::string>> attributes, bool self_closing) {
        if (tag == "p" || kClosesParagraph.contains(tag)) {
            if (stack_.back()->tag == "p") stack_.pop_back();
        }
        if (tag == "li") close_open({"li"}, {"ul", "ol", "menu"});
        if (tag == "dt" || tag == "dd") close_open({"dt", "dd"}, {"dl"});
        if (tag == "td" || tag == "th") close_open({"td", "th"}, {"tr", "table"});
        if (tag == "tr") close_open({"tr"}, {"table", "tbody", "thead", "tfoot"});
        if (tag == "option" && stack_.back()->tag == "option") stack_.pop_back();

        auto node = std::make_unique<Node>();
        node->tag = std::move(tag);
        node->attributes = std::move(attributes);
        node->parent = stack_.back();
        Node* raw = node.get();
        stack_.back()->children.push_back(std::move(node));
        if (!self_closing && !kVoidElements.contains(raw->tag)) stack_.push_back(raw);
    }

    void end_tag(const std::string& tag) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == tag) {
                stack_.resize(i);
                return;
            }
        }
    }

private:
    // Pops through the nearest open element named in `names`, unless a
    // boundary element is open above it.
    void close_open(std::initializer_list<std::string_view> names, std::initializer_list<std::string_view> boundary) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const std::string& t = stack_[i]->tag;
            if (std::find(boundary.begin(), boundary.end(), t) != boundary.end()) return;
            if (std::find(names.begin(), names.end(), t) != names.end()) {
                stack_.resize(i);
                return;
            }
        }
    }

    std::vector<Node*> stack_;
};

// Boundaries of these elements separate words in extracted text.
const std::unordered_set<std::string_view> kBlockElements = {
    "address", "article", "aside", "blockquote", "br", "dd",     "div",   "dl",    "dt",      "figcaption",
    "figure",  "footer",  "h1",    "h2",         "h3", "h4",     "h5",    "h6",    "header",  "hr",
    "li",      "main",    "nav",   "ol",         "p",  "pre",    "section", "table", "td",    "th",
    "tr",      "ul"};

void collect_text(const Node& node, std::string& out) {
    if (node.kind == Node::Kind::text) {
        out += node.text;
        return;
    }
    const bool block = kBlockElements.contains(node.tag);
    if (block) out += ' ';
    for (const auto& child : node.children) collect_text(*child, out);
    if (block) out += ' ';
}

const std::unordered_map<std::string_view, std::uint32_t>& named_entities() {
    static const std::unordered_map<std::string_view, std::uint32_t> table = {
        {"amp", '&'},       {"lt", '<'},        {"gt", '>'},        {"quot", '"'},      {"apos", '\''},
        {"nbsp", ' '},      {"copy", 0xA9},     {"reg", 0xAE},      {"ndash", 0x2013},  {"mdash", 0x2014},
        {"hellip", 0x2026}, {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
        {"laquo", 0xAB},    {"raquo", 0xBB},    {"middot", 0xB7},   {"deg", 0xB0},      {"auml", 0xE4},
        {"ouml", 0xF6},     {"uuml", 0xFC},     {"Auml", 0xC4},     {"Ouml", 0xD6},     {"Uuml", 0xDC},
        {"szlig", 0xDF},    {"eacute", 0xE9},   {"egrave", 0xE8},   {"ecirc", 0xEA},    {"euml", 0xEB},
        {"aacute", 0xE1},   {"agrave", 0xE0},   {"iacute", 0xED},   {"oacute", 0xF3},   {"uacute", 0xFA},
        {"ccedil", 0xE7},   {"ntilde", 0xF1},   {"Eacute", 0xC9},   {"iuml", 0xEF},     {"oslash", 0xF8},
        {"aring", 0xE5},    {"scaron", 0x161},  {"Scaron", 0x160},  {"zcaron", 0x17E},  {"Zcaron", 0x17D},
        {"ccaron", 0x10D},  {"Ccaron", 0x10C},  {"lstrok", 0x142},  {"Lstrok", 0x141},  {"times", 0xD7},
    };
    return table;
}

}  // namespace

std::optional<std::string_view> Node::attribute(std::string_view name) const {
    for (const auto& [k, v] : attributes) {
        if (k == name) return std::string_view(v);
    }
    return std::nullopt;
}

bool Node::has_class(std::string_view name) const {
    auto cls = attribute("class");
    if (!cls) return false;
    std::size_t pos = 0;
    const std::string_view s = *cls;
    while (pos < s.size()) {
        while (pos < s.size() && text::is_space(s[pos])) ++pos;
        std::size_t end = pos;
        while (end < s.size() && !text::is_space(s[end])) ++end;
        if (end > pos && s.substr(pos, end - pos) == name) return true;
        pos = end;
    }
    return false;
}

std::string Node::text_content() const {
    std::string raw;
    collect_text(*this, raw);
    return text::collapse_whitespace(raw);
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out += s[i];
            continue;
        }
        const auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += '&';
            continue;
        }
        const std::string_view body = s.substr(i + 1, semi - i - 1);
        std::optional<std::uint32_t> cp;
        if (body.size() > 1 && body[0] == '#') {
            const bool hex = body[1] == 'x' || body[1] == 'X';
            const std::string_view digits = body.substr(hex ? 2 : 1);
            std::uint32_t v = 0;
            bool ok = !digits.empty();
            for (char c : digits) {
                int d = -1;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                if (d < 0 || v > 0x10FFFF) {
                    ok = false;
                    break;
                }
                v = v * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
            }
            if (ok) cp = v;
        } else if (auto it = named_entities().find(body); it != named_entities().end()) {
            cp = it->second;
        }
        if (!cp) {
            out += '&';
            continue;
        }
        text::append_utf8(out, *cp);
        i = semi;
    }
    return out;
}

Document Document::parse(std::string_view src) {
    Document doc;
    doc.root_ = std::make_unique<Node>();
    TreeBuilder builder(*doc.root_);

    std::size_t pos = 0;
    const std::size_t n = src.size();
    std::string pending;
    auto flush = [&] {
        builder.text(decode_entities(pending));
        pending.clear();
    };

    while (pos < n) {
        const char c = src[pos];
        if (c != '<' || pos + 1 >= n) {
            pending += c;
            ++pos;
            continue;
        }
        const char next = src[pos + 1];
        if (src.compare(pos, 4, "<!--") == 0) {
            flush();
            const auto end = src.find("-->", pos + 4);
            pos = end == std::string_view::npos ? n : end + 3;
            continue;
        }
        if (next == '!' || next == '?') {
            flush();
            const auto end = src.find('>', pos);
            pos = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        if (next == '/') {
            std::size_t p = pos + 2;
            std::string name;
            while (p < n && is_name_char(src[p])) name += src[p++];
            if (name.empty()) {
                pending += c;
                ++pos;
                continue;
            }
            flush();
            const auto end = src.find('>', p);
            pos = end == std::string_view::npos ? n : end + 1;
            builder.end_tag(text::to_lower(name));
            continue;
        }
        if (!std::isalpha(static_cast<unsigned char>(next))) {
            pending += c;
            ++pos;
            continue;
        }

        flush();
        std::size_t p = pos + 1;
        std::string name;
        while (p < n && is_name_char(src[p])) name += src[p++];
        name = text::to_lower(name);
        std::vector<std::pair<std::string, std::string>> attributes;
        bool self_closing = false;
        while (p < n) {
            while (p < n && text::is_space(src[p])) ++p;
            if (p >= n) break;
            if (src[p] == '>') {
                ++p;
                break;
            }
            if (src[p] == '/') {
                self_closing = p + 1 < n && src[p + 1] == '>';
                ++p;
                continue;
            }
            std::string attr;
            while (p < n && !text::is_space(src[p]) && src[p] != '=' && src[p] != '>' && src[p] != '/') {
                attr += src[p++];
            }
            if (attr.empty()) {
                ++p;  // stray character such as a lone quote
                continue;
            }
            while (p < n && text::is_space(src[p])) ++p;
            std::string value;
            if (p < n && src[p] == '=') {
                ++p;
                while (p < n && text::is_space(src[p])) ++p;
                if (p < n && (src[p] == '"' || src[p] == '\'')) {
                    const char quote = src[p++];
                    const auto end = src.find(quote, p);
                    const std::size_t stop = end == std::string_view::npos ? n : end;
                    value = src.substr(p, stop - p);
                    p = stop == n ? n : stop + 1;
                } else {
                    while (p < n && !text::is_space(src[p]) && src[p] != '>') value += src[p++];
                }
            }
            attr = text::to_lower(attr);
            const bool repeated = std::any_of(attributes.begin(), attributes.end(),
                                              [&](const auto& a) { return a.first == attr; });
            if (!repeated) attributes.emplace_back(std::move(attr), decode_entities(value));
        }
        pos = p;

        if (name == "script" || name == "style" || name == "title" || name == "textarea") {
            // Raw text: everything up to the matching end tag.
            std::size_t end = pos;
            while (true) {
                end = src.find("</", end);
                if (end == std::string_view::npos || starts_with_icase(src, end + 2, name)) break;
                end += 2;
            }
            const std::size_t stop = end == std::string_view::npos ? n : end;
            builder.start_tag(name, std::move(attributes), false);
            if (name == "title" || name == "textarea") builder.text(decode_entities(src.substr(pos, stop - pos)));
            builder.end_tag(name);
            if (stop == n) {
                pos = n;
            } else {
                const auto close = src.find('>', stop);
                pos = close == std::string_view::npos ? n : close + 1;
            }
            continue;
        }
        builder.start_tag(std::move(name), std::move(attributes), self_closing);
    }
    flush();
    return doc;
}

namespace {

class SelectorParser {
public:
    explicit SelectorParser(std::string_view s) : s_(s) {}

    std::vector<Selector::Complex> parse() {
        std::vector<Selector::Complex> out;
        while (true) {
            out.push_back(complex());
            skip_space();
            if (pos_ >= s_.size()) break;
            if (s_[pos_] != ',') fail("unexpected '" + std::string(1, s_[pos_]) + "'");
            ++pos_;
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::adapter_selector_invalid,
                    "invalid selector '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + why);
    }

    void skip_space() {
        while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
    }

    bool ident_char(char c) const {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
               static_cast<unsigned char>(c) >= 0x80;
    }

    std::string ident() {
        std::string out;
        while (pos_ < s_.size() && ident_char(s_[pos_])) out += s_[pos_++];
        if (out.empty()) fail("expected a name");
        return out;
    }

    Selector::Complex complex() {
        Selector::Complex steps;
        skip_space();
        bool child = false;
        while (true) {
            if (pos_ >= s_.size() || s_[pos_] == ',') {
                if (steps.empty() || child) fail("empty selector");
                return steps;
            }
            steps.push_back({compound(), child});
            child = false;
            const std::size_t before = pos_;
            skip_space();
            if (pos_ < s_.size() && s_[pos_] == '>') {
                child = true;
                ++pos_;
                skip_space();
            } else if (pos_ == before && pos_ < s_.size() && s_[pos_] != ',') {
                fail("unsupported syntax");
            }
        }
    }

    Selector::Compound compound() {
        Selector::Compound c;
        bool any = false;
        if (pos_ < s_.size() && s_[pos_] == '*') {
            ++pos_;
            any = true;
        } else if (pos_ < s_.size() && ident_char(s_[pos_])) {
            c.tag = text::to_lower(ident());
            any = true;
        }
        while (pos_ < s_.size()) {
            const char ch = s_[pos_];
            if (ch == '#') {
                ++pos_;
                c.ids.push_back(ident());
            } else if (ch == '.') {
                ++pos_;
                c.classes.push_back(ident());
            } else if (ch == '[') {
                ++pos_;
                c.attributes.push_back(attribute());
            } else {
                break;
            }
            any = true;
        }
        if (!any) fail("expected a simple selector");
        return c;
    }

    Selector::AttributeTest attribute() {
        Selector::AttributeTest t;
        skip_space();
        t.name = text::to_lower(ident());
        skip_space();
        if (pos_ >= s_.size()) fail("unterminated attribute selector");
        if (s_[pos_] == ']') {
            ++pos_;
            return t;
        }
        if (s_[pos_] == '=') {
            t.op = '=';
            ++pos_;
        } else if (std::string_view("~^$*").find(s_[pos_]) != std::string_view::npos && pos_ + 1 < s_.size() &&
                   s_[pos_ + 1] == '=') {
            t.op = s_[pos_];
            pos_ += 2;
        } else {
            fail("unsupported attribute operator");
        }
        skip_space();
        if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
            const char quote = s_[pos_++];
            const auto end = s_.find(quote, pos_);
            if (end == std::string_view::npos) fail("unterminated string");
            t.value = std::string(s_.substr(pos_, end - pos_));
            pos_ = end + 1;
        } else {
            t.value = ident();
        }
        skip_space();
        if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
        ++pos_;
        return t;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bool attribute_matches(const Node& node, const Selector::AttributeTest& t) {
    auto v = node.attribute(t.name);
    if (!v) return false;
    switch (t.op) {
        case 0: return true;
        case '=': return *v == t.value;
        case '^': return !t.value.empty() && v->starts_with(t.value);
        case '$': return !t.value.empty() && v->ends_with(t.value);
        case '*': return !t.value.empty() && v->find(t.value) != std::string_view::npos;
        case '~': {
            Node probe;
            probe.attributes = {{"class", std::string(*v)}};
            return probe.has_class(t.value);
        }
    }
    return false;
}

bool compound_matches(const Node& node, const Selector::Compound& c) {
    if (!node.is_element() || node.tag.empty()) return false;
    if (!c.tag.empty() && node.tag != c.tag) return false;
    for (const auto& id : c.ids) {
        if (node.attribute("id") != std::optional<std::string_view>(id)) return false;
    }
    for (const auto& cls : c.classes) {
        if (!node.has_class(cls)) return false;
    }
    for (const auto& a : c.attributes) {
        if (!attribute_matches(node, a)) return false;
    }
    return true;
}

bool matches_from(const Selector::Complex& steps, std::size_t i, const Node& node) {
    if (!compound_matches(node, steps[i].compound)) return false;
    if (i == 0) return true;
    if (steps[i].child_of_previous) return node.parent && matches_from(steps, i - 1, *node.parent);
    for (const Node* a = node.parent; a; a = a->parent) {
        if (matches_from(steps, i - 1, *a)) return true;
    }
    return false;
}

}  // namespace

Selector Selector::compile(std::string_view text) {
    Selector s;
    s.source_ = std::string(text);
    s.alternatives_ = SelectorParser(text).parse();
    return s;
}

bool Selector::matches(const Node& element) const {
    return std::any_of(alternatives_.begin(), alternatives_.end(),
                       [&](const Complex& c) { return matches_from(c, c.size() - 1, element); });
}

std::vector<const Node*> Selector::select(const Node& scope) const {
    std::vector<const Node*> out;
    std::function<void(const Node&)> walk = [&](const Node& node) {
        for (const auto& child : node.children) {
            if (!child->is_element()) continue;
            if (matches(*child)) out.push_back(child.get());
            walk(*child);
        }
    };
    walk(scope);
    return out;
}

const Node* Selector::select_first(const Node& scope) const {
    std::function<const Node*(const Node&)> walk = [&](const Node& node) -> const Node* {
        for (const auto& child : node.children) {
            if (!child->is_element()) continue;
            if (matches(*child)) return child.get();
            if (const Node* found = walk(*child)) return found;
        }
        return nullptr;
    };
    return walk(scope);
}

}  // namespace atelier::html

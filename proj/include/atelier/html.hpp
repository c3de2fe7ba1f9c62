#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atelier::html {

struct Node {
    enum class Kind { element, text };

    Kind kind = Kind::element;
    std::string tag;  // lowercase; empty for text and the document root
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string text;  // decoded, for text nodes
    Node* parent = nullptr;
    std::vector<std::unique_ptr<Node>> children;

    bool is_element() const noexcept { return kind == Kind::element; }
    std::optional<std::string_view> attribute(std::string_view name) const;
    bool has_class(std::string_view name) const;

    // Concatenated descendant text, whitespace collapsed and trimmed.
    std::string text_content() const;
};

// Forgiving HTML tree builder: unknown tags are kept, stray end tags are
// dropped, unclosed elements close at their parent's end tag or at EOF,
// and the usual implied end tags (p, li, td, tr, option, ...) are honored.
// Script, style and comments never produce text.
class Document {
public:
    static Document parse(std::string_view source);

    const Node& root() const noexcept { return *root_; }

private:
    std::unique_ptr<Node> root_;
};

std::string decode_entities(std::string_view text);

// CSS selector subset: type, universal, #id, .class, [attr], [attr=v],
// [attr~=v], [attr^=v], [attr$=v], [attr*=v], descendant (space) and child
// (>) combinators, and comma-separated groups.
class Selector {
public:
    // Throws Error(adapter_selector_invalid).
    static Selector compile(std::string_view text);

    bool matches(const Node& element) const;

    // Matching elements strictly below scope, in document order.
    std::vector<const Node*> select(const Node& scope) const;
    const Node* select_first(const Node& scope) const;

    const std::string& source() const noexcept { return source_; }

    struct AttributeTest {
        std::string name;
        char op = 0;  // 0 = presence, '=', '~', '^', '$', '*'
        std::string value;
    };
    struct Compound {
        std::string tag;  // empty = any
        std::vector<std::string> ids;
        std::vector<std::string> classes;
        std::vector<AttributeTest> attributes;
    };
    struct Step {
        Compound compound;
        bool child_of_previous = false;  // '>' between previous step and this one
    };
    using Complex = std::vector<Step>;

private:
    std::string source_;
    std::vector<Complex> alternatives_;
};

}  // namespace atelier::html

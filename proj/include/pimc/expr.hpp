// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace pimc
{

// Total map from parameter names to values.
using valuation = std::map< std::string, rational >;

enum class arith_op { add, sub, mul, div };

inline char op_symbol( arith_op op )
{
    switch ( op ) {
        case arith_op::add: return '+';
        case arith_op::sub: return '-';
        case arith_op::mul: return '*';
        case arith_op::div: return '/';
    }
    return '?';
}

// Rational function over named parameters, kept as an immutable expression
// tree. Copies share structure.
class param_expr
{
public:
    enum class kind { constant, parameter, binary };

private:
    struct node
    {
        kind tag;
        rational value;
        std::string name;
        arith_op op = arith_op::add;
        std::shared_ptr< const node > lhs;
        std::shared_ptr< const node > rhs;
    };

    std::shared_ptr< const node > _node;

    explicit param_expr( std::shared_ptr< const node > n ) : _node{ std::move( n ) } {}

public:
    param_expr() : param_expr( rational( 0 ) ) {}

    param_expr( rational value ) // NOLINT (implicit on purpose: constants read naturally)
        : _node{ std::make_shared< const node >( node{ kind::constant, std::move( value ), {}, {}, {}, {} } ) } {}

    static param_expr constant( rational value ) { return param_expr( std::move( value ) ); }

    static param_expr parameter( std::string name )
    {
        return param_expr( std::make_shared< const node >( node{ kind::parameter, {}, std::move( name ), {}, {}, {} } ) );
    }

    static param_expr binary( arith_op op, const param_expr& lhs, const param_expr& rhs )
    {
        return param_expr( std::make_shared< const node >( node{ kind::binary, {}, {}, op, lhs._node, rhs._node } ) );
    }

    [[nodiscard]] kind tag() const { return _node->tag; }
    [[nodiscard]] const rational& value() const { return _node->value; }
    [[nodiscard]] const std::string& name() const { return _node->name; }
    [[nodiscard]] arith_op op() const { return _node->op; }
    [[nodiscard]] param_expr lhs() const { return param_expr( _node->lhs ); }
    [[nodiscard]] param_expr rhs() const { return param_expr( _node->rhs ); }

    [[nodiscard]] bool is_literal() const { return tag() == kind::constant; }

    [[nodiscard]] rational evaluate( const valuation& v ) const
    {
        switch ( tag() ) {
            case kind::constant:
                return value();
            case kind::parameter: {
                auto it = v.find( name() );
                if ( it == v.end() )
                    throw error( "no value for parameter " + name() );
                return it->second;
            }
            case kind::binary: {
                rational a = lhs().evaluate( v );
                rational b = rhs().evaluate( v );
                switch ( op() ) {
                    case arith_op::add: return a + b;
                    case arith_op::sub: return a - b;
                    case arith_op::mul: return a * b;
                    case arith_op::div:
                        if ( b == 0 )
                            throw division_by_zero( "division by zero in " + to_string() );
                        return a / b;
                }
            }
        }
        throw error( "corrupt expression" );
    }

    // Value when the expression mentions no parameter.
    [[nodiscard]] std::optional< rational > constant_value() const
    {
        if ( !parameters().empty() )
            return std::nullopt;
        return evaluate( {} );
    }

    void collect_parameters( std::set< std::string >& out ) const
    {
        switch ( tag() ) {
            case kind::constant: break;
            case kind::parameter: out.insert( name() ); break;
            case kind::binary:
                lhs().collect_parameters( out );
                rhs().collect_parameters( out );
                break;
        }
    }

    [[nodiscard]] std::set< std::string > parameters() const
    {
        std::set< std::string > out;
        collect_parameters( out );
        return out;
    }

    // Minimal parentheses; output re-parses to a structurally equal tree.
    [[nodiscard]] std::string to_string() const { return print( 0, false ); }

    friend bool operator==( const param_expr& a, const param_expr& b )
    {
        if ( a._node == b._node )
            return true;
        if ( a.tag() != b.tag() )
            return false;
        switch ( a.tag() ) {
            case kind::constant: return a.value() == b.value();
            case kind::parameter: return a.name() == b.name();
            case kind::binary:
                return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
        }
        return false;
    }

    friend param_expr operator+( const param_expr& a, const param_expr& b ) { return binary( arith_op::add, a, b ); }
    friend param_expr operator-( const param_expr& a, const param_expr& b ) { return binary( arith_op::sub, a, b ); }
    friend param_expr operator*( const param_expr& a, const param_expr& b ) { return binary( arith_op::mul, a, b ); }
    friend param_expr operator/( const param_expr& a, const param_expr& b ) { return binary( arith_op::div, a, b ); }

private:
    static int precedence( arith_op op ) { return op == arith_op::add || op == arith_op::sub ? 1 : 2; }

    // `context` is the precedence of the enclosing operator; `right` marks a
    // right operand, which needs parentheses at equal precedence too.
    [[nodiscard]] std::string print( int context, bool right ) const
    {
        switch ( tag() ) {
            case kind::constant: {
                if ( value() < 0 )
                    return "(0 - " + pimc::to_string( rational( -value() ) ) + ")";
                // A fraction literal binds tighter than any operator.
                return pimc::to_string( value() );
            }
            case kind::parameter:
                return name();
            case kind::binary: {
                int prec = precedence( op() );
                std::string text = lhs().print( prec, false ) + " " + op_symbol( op() ) + " " + rhs().print( prec, true );
                if ( prec < context || ( right && prec == context ) )
                    return "(" + text + ")";
                return text;
            }
        }
        return "?";
    }
};

} // namespace pimc

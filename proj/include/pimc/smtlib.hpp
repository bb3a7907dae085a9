// SPDX-License-Identifier: Apache-2.0
#pragma once

// SMT-LIB 2 (QF_NRA) emission of constraint problems, and reading back the
// s-expressions a solver prints.

#include "csp.hpp"
#include "errors.hpp"
#include "rational.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pimc
{

// 3, (/ 3 10), (- 2), (- (/ 1 2))
inline std::string smt_number( const rational& r )
{
    if ( r < 0 )
        return "(- " + smt_number( -r ) + ")";
    if ( r.get_den() == 1 )
        return r.get_num().get_str();
    return "(/ " + r.get_num().get_str() + " " + r.get_den().get_str() + ")";
}

inline std::string smt_term( const term& t )
{
    switch ( t.tag() ) {
    case term::kind::constant:
        return smt_number( t.value() );
    case term::kind::var:
        return t.name();
    default:
        break;
    }
    const char* op = t.tag() == term::kind::add ? "+" : t.tag() == term::kind::sub ? "-" : t.tag() == term::kind::mul ? "*" : "/";
    std::string out = std::string( "(" ) + op;
    for ( const auto& a : t.args() )
        out += " " + smt_term( a );
    return out + ")";
}

inline std::string smt_formula( const formula& f )
{
    auto nary = [ & ]( const char* op ) {
        std::string out = std::string( "(" ) + op;
        for ( const auto& a : f.args() )
            out += " " + smt_formula( a );
        return out + ")";
    };
    switch ( f.tag() ) {
    case formula::kind::truth:
        return "true";
    case formula::kind::falsity:
        return "false";
    case formula::kind::bvar:
        return f.name();
    case formula::kind::negation:
        return nary( "not" );
    case formula::kind::conj:
        return nary( "and" );
    case formula::kind::disj:
        return nary( "or" );
    case formula::kind::implies:
        return nary( "=>" );
    case formula::kind::iff:
        return nary( "=" );
    case formula::kind::cmp:
        return std::string( "(" ) + to_string( f.op() ) + " " + smt_term( f.lhs() ) + " " + smt_term( f.rhs() ) + ")";
    }
    return "?";
}

struct smt_script
{
    std::string text;
    std::size_t declarations = 0;
    std::size_t assertions = 0;
};

// Deterministic: declarations in declaration order, domain assertions, then
// the constraints in order, each preceded by its number and source.
inline smt_script emit_smtlib( const csp& c )
{
    smt_script out;
    std::ostringstream os;
    os << "; pimc constraint problem\n(set-logic QF_NRA)\n";
    for ( const auto& v : c.vars() ) {
        os << "(declare-const " << v.name << ( v.sort == var_sort::boolean ? " Bool" : " Real" ) << ")\n";
        ++out.declarations;
    }
    os << "; domains\n";
    for ( const auto& v : c.vars() ) {
        if ( v.sort == var_sort::boolean )
            continue;
        os << "(assert (and (<= " << smt_number( v.lo ) << " " << v.name << ") (<= " << v.name << " "
           << smt_number( v.hi ) << ")))\n";
        ++out.assertions;
        if ( v.sort == var_sort::counter ) {
            os << "(assert (=> (< " << v.name << " 1) (= " << v.name << " 0)))\n";
            ++out.assertions;
        }
    }
    for ( const auto& k : c.constraints() ) {
        os << "; ";
        if ( k.number > 0 )
            os << "(" << k.number << ") ";
        os << k.source << "\n(assert " << smt_formula( k.body ) << ")\n";
        ++out.assertions;
    }
    os << "(check-sat)\n(get-model)\n";
    out.text = os.str();
    return out;
}

struct sexpr
{
    bool atom = true;
    std::string text;
    std::vector< sexpr > items;

    [[nodiscard]] bool is( const std::string& s ) const { return atom && text == s; }
    [[nodiscard]] bool head( const std::string& s ) const { return !atom && !items.empty() && items[ 0 ].is( s ); }
};

namespace detail
{

class sexpr_reader
{
    const std::string& _s;
    std::size_t _pos = 0;

    void skip()
    {
        while ( _pos < _s.size() ) {
            if ( std::isspace( static_cast< unsigned char >( _s[ _pos ] ) ) ) {
                ++_pos;
            } else if ( _s[ _pos ] == ';' ) {
                while ( _pos < _s.size() && _s[ _pos ] != '\n' )
                    ++_pos;
            } else {
                break;
            }
        }
    }

public:
    explicit sexpr_reader( const std::string& s, std::size_t pos = 0 ) : _s{ s }, _pos{ pos } {}

    [[nodiscard]] std::size_t pos() const { return _pos; }

    bool at_end()
    {
        skip();
        return _pos >= _s.size();
    }

    sexpr read()
    {
        skip();
        if ( _pos >= _s.size() )
            throw error( "unexpected end of s-expression" );
        char c = _s[ _pos ];
        if ( c == '(' ) {
            ++_pos;
            sexpr list;
            list.atom = false;
            while ( true ) {
                skip();
                if ( _pos >= _s.size() )
                    throw error( "unbalanced parenthesis" );
                if ( _s[ _pos ] == ')' ) {
                    ++_pos;
                    return list;
                }
                list.items.push_back( read() );
            }
        }
        if ( c == ')' )
            throw error( "unexpected ')'" );
        sexpr a;
        if ( c == '"' || c == '|' ) {
            std::size_t end = _s.find( c, _pos + 1 );
            if ( end == std::string::npos )
                throw error( "unterminated literal" );
            a.text = _s.substr( _pos + 1, end - _pos - 1 );
            _pos = end + 1;
            return a;
        }
        std::size_t start = _pos;
        while ( _pos < _s.size() && !std::isspace( static_cast< unsigned char >( _s[ _pos ] ) ) && _s[ _pos ] != '('
                && _s[ _pos ] != ')' )
            ++_pos;
        a.text = _s.substr( start, _pos - start );
        return a;
    }
};

// Univariate polynomial, coefficient k belongs to x^k.
using polynomial = std::vector< rational >;

inline void trim( polynomial& p )
{
    while ( !p.empty() && p.back() == 0 )
        p.pop_back();
}

inline polynomial poly_add( polynomial a, const polynomial& b, const rational& scale = 1 )
{
    if ( a.size() < b.size() )
        a.resize( b.size() );
    for ( std::size_t k = 0; k < b.size(); ++k )
        a[ k ] += scale * b[ k ];
    trim( a );
    return a;
}

inline polynomial poly_mul( const polynomial& a, const polynomial& b )
{
    if ( a.empty() || b.empty() )
        return {};
    polynomial out( a.size() + b.size() - 1 );
    for ( std::size_t i = 0; i < a.size(); ++i )
        for ( std::size_t j = 0; j < b.size(); ++j )
            out[ i + j ] += a[ i ] * b[ j ];
    trim( out );
    return out;
}

inline rational poly_eval( const polynomial& p, const rational& x )
{
    rational acc( 0 );
    for ( std::size_t k = p.size(); k-- > 0; )
        acc = acc * x + p[ k ];
    return acc;
}

inline polynomial poly_derivative( const polynomial& p )
{
    polynomial out;
    for ( std::size_t k = 1; k < p.size(); ++k )
        out.push_back( p[ k ] * rational( static_cast< long >( k ) ) );
    trim( out );
    return out;
}

inline polynomial poly_rem( polynomial a, const polynomial& b )
{
    while ( a.size() >= b.size() && !a.empty() ) {
        rational f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        for ( std::size_t k = 0; k < b.size(); ++k )
            a[ k + shift ] -= f * b[ k ];
        a.pop_back();
        trim( a );
    }
    return a;
}

inline std::optional< rational > sexpr_number( const sexpr& e );

inline polynomial to_polynomial( const sexpr& e )
{
    if ( e.atom ) {
        if ( e.text == "x" )
            return { rational( 0 ), rational( 1 ) };
        auto v = parse_rational( e.text );
        if ( !v )
            throw error( "bad polynomial atom " + e.text );
        polynomial p{ *v };
        trim( p );
        return p;
    }
    if ( e.items.empty() || !e.items[ 0 ].atom )
        throw error( "bad polynomial" );
    const std::string& op = e.items[ 0 ].text;
    if ( op == "^" ) {
        auto base = to_polynomial( e.items.at( 1 ) );
        auto n = std::strtol( e.items.at( 2 ).text.c_str(), nullptr, 10 );
        polynomial out{ rational( 1 ) };
        for ( long k = 0; k < n; ++k )
            out = poly_mul( out, base );
        return out;
    }
    if ( op == "-" && e.items.size() == 2 )
        return poly_mul( to_polynomial( e.items[ 1 ] ), { rational( -1 ) } );
    polynomial acc = to_polynomial( e.items.at( 1 ) );
    for ( std::size_t k = 2; k < e.items.size(); ++k ) {
        auto next = to_polynomial( e.items[ k ] );
        if ( op == "+" )
            acc = poly_add( acc, next );
        else if ( op == "-" )
            acc = poly_add( acc, next, -1 );
        else if ( op == "*" )
            acc = poly_mul( acc, next );
        else if ( op == "/" ) {
            if ( next.size() != 1 )
                throw error( "non-constant divisor in polynomial" );
            acc = poly_mul( acc, { 1 / next[ 0 ] } );
        } else
            throw error( "unknown polynomial operator " + op );
    }
    return acc;
}

inline int sign_changes( const std::vector< polynomial >& chain, const rational& x )
{
    int changes = 0, last = 0;
    for ( const auto& p : chain ) {
        int s = sgn( poly_eval( p, x ) );
        if ( s == 0 )
            continue;
        if ( last != 0 && s != last )
            ++changes;
        last = s;
    }
    return changes;
}

// k-th smallest real root (1-based), isolated with a Sturm sequence and
// bisected until the bracket is narrower than 2^-32.
inline rational algebraic_root( polynomial p, long k )
{
    trim( p );
    if ( p.size() < 2 || k < 1 )
        throw error( "bad root-obj" );
    std::vector< polynomial > chain{ p, poly_derivative( p ) };
    while ( chain.back().size() > 1 ) {
        auto r = poly_rem( chain[ chain.size() - 2 ], chain.back() );
        if ( r.empty() )
            break;
        chain.push_back( poly_mul( r, { rational( -1 ) } ) );
    }
    rational bound( 0 );
    for ( std::size_t i = 0; i + 1 < p.size(); ++i )
        bound = std::max( bound, rational( abs( p[ i ] / p.back() ) ) );
    bound += 1;
    rational lo = -bound, hi = bound;
    const int base = sign_changes( chain, lo );
    if ( base - sign_changes( chain, hi ) < k )
        throw error( "root-obj index out of range" );
    const rational width( 1, 1L << 30 );
    while ( hi - lo > width / 4 ) {
        rational mid = ( lo + hi ) / 2;
        while ( poly_eval( p, mid ) == 0 ) {
            if ( base - sign_changes( chain, mid + width / 8 ) >= k && base - sign_changes( chain, mid - width / 8 ) < k )
                return mid;
            mid += ( hi - lo ) / 7;
        }
        if ( base - sign_changes( chain, mid ) >= k )
            hi = mid;
        else
            lo = mid;
    }
    return ( lo + hi ) / 2;
}

inline std::optional< rational > sexpr_number( const sexpr& e )
{
    if ( e.atom )
        return parse_rational( e.text );
    if ( e.items.empty() || !e.items[ 0 ].atom )
        return std::nullopt;
    const std::string& op = e.items[ 0 ].text;
    if ( op != "+" && op != "-" && op != "*" && op != "/" )
        return std::nullopt;
    std::vector< rational > args;
    for ( std::size_t k = 1; k < e.items.size(); ++k ) {
        auto v = sexpr_number( e.items[ k ] );
        if ( !v )
            return std::nullopt;
        args.push_back( *v );
    }
    if ( args.empty() )
        return std::nullopt;
    if ( op == "-" && args.size() == 1 )
        return -args[ 0 ];
    rational acc = args[ 0 ];
    for ( std::size_t k = 1; k < args.size(); ++k ) {
        if ( op == "+" )
            acc += args[ k ];
        else if ( op == "-" )
            acc -= args[ k ];
        else if ( op == "*" )
            acc *= args[ k ];
        else if ( op == "/" ) {
            if ( args[ k ] == 0 )
                return std::nullopt;
            acc /= args[ k ];
        } else
            return std::nullopt;
    }
    return acc;
}

} // namespace detail

inline std::vector< sexpr > parse_sexprs( const std::string& text )
{
    detail::sexpr_reader r( text );
    std::vector< sexpr > out;
    while ( !r.at_end() )
        out.push_back( r.read() );
    return out;
}

struct model_value
{
    bool is_bool = false;
    bool boolean = false;
    rational number;
    bool approximate = false; // irrational value replaced by a close rational
};

// Value of a define-fun body: true/false, numerals, decimals, arithmetic over
// them, and root-obj for algebraic numbers.
inline model_value read_model_value( const sexpr& e )
{
    model_value v;
    if ( e.is( "true" ) || e.is( "false" ) ) {
        v.is_bool = true;
        v.boolean = e.is( "true" );
        return v;
    }
    if ( auto r = detail::sexpr_number( e ) ) {
        v.number = *r;
        return v;
    }
    if ( e.head( "root-obj" ) && e.items.size() == 3 ) {
        v.number = detail::algebraic_root( detail::to_polynomial( e.items[ 1 ] ),
                                           std::strtol( e.items[ 2 ].text.c_str(), nullptr, 10 ) );
        v.approximate = true;
        return v;
    }
    if ( e.head( "-" ) && e.items.size() == 2 ) {
        auto inner = read_model_value( e.items[ 1 ] );
        inner.number = -inner.number;
        return inner;
    }
    std::ostringstream os;
    os << "unsupported model value";
    if ( e.atom )
        os << " " << e.text;
    else if ( !e.items.empty() && e.items[ 0 ].atom )
        os << " (" << e.items[ 0 ].text << " ...)";
    throw error( os.str() );
}

} // namespace pimc

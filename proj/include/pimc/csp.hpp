// SPDX-License-Identifier: Apache-2.0
#pragma once

// Solver-independent constraint problems: typed variables with domains and a
// Boolean/arithmetic constraint tree.

#include "errors.hpp"
#include "expr.hpp"
#include "rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pimc
{

enum class var_sort { boolean, real, counter };

inline const char* to_string( var_sort s )
{
    switch ( s ) {
    case var_sort::boolean:
        return "bool";
    case var_sort::real:
        return "real";
    case var_sort::counter:
        return "counter";
    }
    return "?";
}

struct variable
{
    std::string name;
    var_sort sort = var_sort::real;
    rational lo; // ignored for booleans
    rational hi;

    bool operator==( const variable& ) const = default;
};

class term
{
public:
    enum class kind { constant, var, add, sub, mul, div };

private:
    struct node
    {
        kind tag;
        rational value;
        std::string name;
        std::vector< term > args;
    };
    std::shared_ptr< const node > _n;

    explicit term( node n ) : _n{ std::make_shared< const node >( std::move( n ) ) } {}

public:
    term() : term( rational( 0 ) ) {}
    term( const rational& v ) : term( node{ kind::constant, v, {}, {} } ) {}
    term( long v ) : term( rational( v ) ) {}

    static term var( std::string name ) { return term( node{ kind::var, {}, std::move( name ), {} } ); }

    // Empty sum is 0, a single summand is returned as is.
    static term sum( std::vector< term > parts )
    {
        if ( parts.empty() )
            return term( rational( 0 ) );
        if ( parts.size() == 1 )
            return parts.front();
        return term( node{ kind::add, {}, {}, std::move( parts ) } );
    }

    static term product( std::vector< term > parts )
    {
        if ( parts.empty() )
            return term( rational( 1 ) );
        if ( parts.size() == 1 )
            return parts.front();
        return term( node{ kind::mul, {}, {}, std::move( parts ) } );
    }

    static term difference( term a, term b ) { return term( node{ kind::sub, {}, {}, { std::move( a ), std::move( b ) } } ); }
    static term quotient( term a, term b ) { return term( node{ kind::div, {}, {}, { std::move( a ), std::move( b ) } } ); }

    [[nodiscard]] kind tag() const { return _n->tag; }
    [[nodiscard]] bool is_constant() const { return _n->tag == kind::constant; }
    [[nodiscard]] const rational& value() const { return _n->value; }
    [[nodiscard]] const std::string& name() const { return _n->name; }
    [[nodiscard]] const std::vector< term >& args() const { return _n->args; }

    friend bool operator==( const term& a, const term& b )
    {
        if ( a._n == b._n )
            return true;
        return a.tag() == b.tag() && a.value() == b.value() && a.name() == b.name() && a.args() == b.args();
    }

    void collect_vars( std::set< std::string >& out ) const
    {
        if ( tag() == kind::var )
            out.insert( name() );
        for ( const auto& a : args() )
            a.collect_vars( out );
    }

    [[nodiscard]] std::string to_string() const
    {
        switch ( tag() ) {
        case kind::constant:
            return pimc::to_string( value() );
        case kind::var:
            return name();
        default:
            break;
        }
        const char* op = tag() == kind::add ? " + " : tag() == kind::sub ? " - " : tag() == kind::mul ? " * " : " / ";
        std::string out = "(";
        for ( std::size_t k = 0; k < args().size(); ++k )
            out += ( k ? op : "" ) + args()[ k ].to_string();
        return out + ")";
    }
};

inline term operator+( term a, term b ) { return term::sum( { std::move( a ), std::move( b ) } ); }
inline term operator-( term a, term b ) { return term::difference( std::move( a ), std::move( b ) ); }
inline term operator*( term a, term b ) { return term::product( { std::move( a ), std::move( b ) } ); }
inline term operator/( term a, term b ) { return term::quotient( std::move( a ), std::move( b ) ); }

enum class cmp_op { lt, le, eq, ge, gt };

inline const char* to_string( cmp_op op )
{
    switch ( op ) {
    case cmp_op::lt:
        return "<";
    case cmp_op::le:
        return "<=";
    case cmp_op::eq:
        return "=";
    case cmp_op::ge:
        return ">=";
    case cmp_op::gt:
        return ">";
    }
    return "?";
}

// The operator whose truth value is the complement: < becomes >=, and so on.
// Equality has no single-operator complement.
inline cmp_op negate( cmp_op op )
{
    switch ( op ) {
    case cmp_op::lt:
        return cmp_op::ge;
    case cmp_op::le:
        return cmp_op::gt;
    case cmp_op::ge:
        return cmp_op::lt;
    case cmp_op::gt:
        return cmp_op::le;
    case cmp_op::eq:
        break;
    }
    throw error( "equality has no complement operator" );
}

inline bool holds( cmp_op op, const rational& a, const rational& b )
{
    switch ( op ) {
    case cmp_op::lt:
        return a < b;
    case cmp_op::le:
        return a <= b;
    case cmp_op::eq:
        return a == b;
    case cmp_op::ge:
        return a >= b;
    case cmp_op::gt:
        return a > b;
    }
    return false;
}

class formula
{
public:
    enum class kind { truth, falsity, bvar, negation, conj, disj, implies, iff, cmp };

private:
    struct node
    {
        kind tag;
        std::string name;
        std::vector< formula > args;
        cmp_op op = cmp_op::eq;
        std::vector< term > sides;
    };
    std::shared_ptr< const node > _n;

    explicit formula( node n ) : _n{ std::make_shared< const node >( std::move( n ) ) } {}

    static formula make( kind k, std::vector< formula > args ) { return formula( node{ k, {}, std::move( args ), cmp_op::eq, {} } ); }

public:
    formula() : formula( node{ kind::truth, {}, {}, cmp_op::eq, {} } ) {}

    static formula truth() { return formula( node{ kind::truth, {}, {}, cmp_op::eq, {} } ); }
    static formula falsity() { return formula( node{ kind::falsity, {}, {}, cmp_op::eq, {} } ); }
    static formula constant( bool b ) { return b ? truth() : falsity(); }
    static formula bvar( std::string name ) { return formula( node{ kind::bvar, std::move( name ), {}, cmp_op::eq, {} } ); }

    static formula negation( formula f )
    {
        if ( f.tag() == kind::truth )
            return falsity();
        if ( f.tag() == kind::falsity )
            return truth();
        return make( kind::negation, { std::move( f ) } );
    }

    // Truths are dropped, a falsity absorbs; empty is true.
    static formula conj( std::vector< formula > parts )
    {
        std::vector< formula > kept;
        for ( auto& f : parts ) {
            if ( f.tag() == kind::falsity )
                return falsity();
            if ( f.tag() != kind::truth )
                kept.push_back( std::move( f ) );
        }
        if ( kept.empty() )
            return truth();
        if ( kept.size() == 1 )
            return kept.front();
        return make( kind::conj, std::move( kept ) );
    }

    // Falsities are dropped, a truth absorbs; empty is false.
    static formula disj( std::vector< formula > parts )
    {
        std::vector< formula > kept;
        for ( auto& f : parts ) {
            if ( f.tag() == kind::truth )
                return truth();
            if ( f.tag() != kind::falsity )
                kept.push_back( std::move( f ) );
        }
        if ( kept.empty() )
            return falsity();
        if ( kept.size() == 1 )
            return kept.front();
        return make( kind::disj, std::move( kept ) );
    }

    static formula implies( formula a, formula b )
    {
        if ( a.tag() == kind::truth )
            return b;
        if ( a.tag() == kind::falsity || b.tag() == kind::truth )
            return truth();
        return make( kind::implies, { std::move( a ), std::move( b ) } );
    }

    static formula iff( formula a, formula b ) { return make( kind::iff, { std::move( a ), std::move( b ) } ); }

    // Comparisons between two constants fold to true/false.
    static formula compare( term a, cmp_op op, term b )
    {
        if ( a.is_constant() && b.is_constant() )
            return constant( holds( op, a.value(), b.value() ) );
        return formula( node{ kind::cmp, {}, {}, op, { std::move( a ), std::move( b ) } } );
    }

    [[nodiscard]] kind tag() const { return _n->tag; }
    [[nodiscard]] const std::string& name() const { return _n->name; }
    [[nodiscard]] const std::vector< formula >& args() const { return _n->args; }
    [[nodiscard]] cmp_op op() const { return _n->op; }
    [[nodiscard]] const term& lhs() const { return _n->sides.at( 0 ); }
    [[nodiscard]] const term& rhs() const { return _n->sides.at( 1 ); }

    friend bool operator==( const formula& a, const formula& b )
    {
        if ( a._n == b._n )
            return true;
        return a.tag() == b.tag() && a.name() == b.name() && a.args() == b.args() && a.op() == b.op()
               && a._n->sides == b._n->sides;
    }

    void collect_vars( std::set< std::string >& bools, std::set< std::string >& numbers ) const
    {
        if ( tag() == kind::bvar )
            bools.insert( name() );
        for ( const auto& a : args() )
            a.collect_vars( bools, numbers );
        for ( const auto& t : _n->sides )
            t.collect_vars( numbers );
    }

    [[nodiscard]] std::string to_string() const
    {
        auto joined = [ & ]( const char* op ) {
            std::string out = "(";
            for ( std::size_t k = 0; k < args().size(); ++k )
                out += ( k ? op : "" ) + args()[ k ].to_string();
            return out + ")";
        };
        switch ( tag() ) {
        case kind::truth:
            return "true";
        case kind::falsity:
            return "false";
        case kind::bvar:
            return name();
        case kind::negation:
            return "!" + args()[ 0 ].to_string();
        case kind::conj:
            return joined( " & " );
        case kind::disj:
            return joined( " | " );
        case kind::implies:
            return joined( " => " );
        case kind::iff:
            return joined( " <=> " );
        case kind::cmp:
            return lhs().to_string() + " " + pimc::to_string( op() ) + " " + rhs().to_string();
        }
        return "?";
    }
};

inline formula operator!( formula f ) { return formula::negation( std::move( f ) ); }
inline formula operator&&( formula a, formula b ) { return formula::conj( { std::move( a ), std::move( b ) } ); }
inline formula operator||( formula a, formula b ) { return formula::disj( { std::move( a ), std::move( b ) } ); }

inline formula lt( term a, term b ) { return formula::compare( std::move( a ), cmp_op::lt, std::move( b ) ); }
inline formula le( term a, term b ) { return formula::compare( std::move( a ), cmp_op::le, std::move( b ) ); }
inline formula eq( term a, term b ) { return formula::compare( std::move( a ), cmp_op::eq, std::move( b ) ); }
inline formula ge( term a, term b ) { return formula::compare( std::move( a ), cmp_op::ge, std::move( b ) ); }
inline formula gt( term a, term b ) { return formula::compare( std::move( a ), cmp_op::gt, std::move( b ) ); }
inline formula ne( term a, term b ) { return !eq( std::move( a ), std::move( b ) ); }

struct constraint
{
    formula body;
    int number = 0; // 1..18 for the encodings, 0 for goals and extras
    std::string source;
};

class csp
{
    std::vector< variable > _vars;
    std::map< std::string, std::size_t > _index;
    std::vector< constraint > _constraints;

public:
    const variable& declare( std::string name, var_sort sort, rational lo = 0, rational hi = 1 )
    {
        if ( _index.count( name ) )
            throw error( "variable " + name + " declared twice" );
        _index[ name ] = _vars.size();
        _vars.push_back( { std::move( name ), sort, std::move( lo ), std::move( hi ) } );
        return _vars.back();
    }

    [[nodiscard]] bool has( const std::string& name ) const { return _index.count( name ) != 0; }

    [[nodiscard]] const variable& var( const std::string& name ) const
    {
        auto it = _index.find( name );
        if ( it == _index.end() )
            throw error( "unknown variable " + name );
        return _vars[ it->second ];
    }

    void add( formula f, int number, std::string source = {} )
    {
        _constraints.push_back( { std::move( f ), number, std::move( source ) } );
    }

    [[nodiscard]] const std::vector< variable >& vars() const { return _vars; }
    [[nodiscard]] const std::vector< constraint >& constraints() const { return _constraints; }

    [[nodiscard]] std::size_t count_numbered( int number ) const
    {
        std::size_t n = 0;
        for ( const auto& c : _constraints )
            n += c.number == number;
        return n;
    }
};

// Names referenced but not declared, or declared with the wrong sort.
inline std::vector< std::string > well_formedness_errors( const csp& c )
{
    std::vector< std::string > out;
    for ( const auto& k : c.constraints() ) {
        std::set< std::string > bools, numbers;
        k.body.collect_vars( bools, numbers );
        for ( const auto& b : bools ) {
            if ( !c.has( b ) )
                out.push_back( "undeclared variable " + b );
            else if ( c.var( b ).sort != var_sort::boolean )
                out.push_back( b + " used as a Boolean" );
        }
        for ( const auto& n : numbers ) {
            if ( !c.has( n ) )
                out.push_back( "undeclared variable " + n );
            else if ( c.var( n ).sort == var_sort::boolean )
                out.push_back( n + " used as a number" );
        }
    }
    return out;
}

// Parameter expressions become terms over the parameter variables.
inline std::string param_var( const std::string& p ) { return "param_" + p; }

inline term to_term( const param_expr& e )
{
    try {
        if ( auto v = e.constant_value() )
            return term( *v );
    } catch ( const division_by_zero& ) {
        // kept symbolic; the solver treats x / 0 as unconstrained
    }
    switch ( e.tag() ) {
    case param_expr::kind::constant:
        return term( e.value() );
    case param_expr::kind::parameter:
        return term::var( param_var( e.name() ) );
    case param_expr::kind::binary:
        break;
    }
    term a = to_term( e.lhs() ), b = to_term( e.rhs() );
    switch ( e.op() ) {
    case arith_op::add:
        return a + b;
    case arith_op::sub:
        return a - b;
    case arith_op::mul:
        return a * b;
    case arith_op::div:
        return a / b;
    }
    throw error( "bad expression node" );
}

// Total assignment of every variable.
using assignment = std::map< std::string, std::variant< bool, rational > >;

enum class counter_semantics { integer, relaxed };

inline rational eval( const term& t, const assignment& a )
{
    switch ( t.tag() ) {
    case term::kind::constant:
        return t.value();
    case term::kind::var: {
        auto it = a.find( t.name() );
        if ( it == a.end() || !std::holds_alternative< rational >( it->second ) )
            throw error( "no numeric value for " + t.name() );
        return std::get< rational >( it->second );
    }
    case term::kind::add: {
        rational s( 0 );
        for ( const auto& x : t.args() )
            s += eval( x, a );
        return s;
    }
    case term::kind::mul: {
        rational s( 1 );
        for ( const auto& x : t.args() )
            s *= eval( x, a );
        return s;
    }
    case term::kind::sub:
        return eval( t.args()[ 0 ], a ) - eval( t.args()[ 1 ], a );
    case term::kind::div: {
        rational d = eval( t.args()[ 1 ], a );
        if ( d == 0 )
            throw division_by_zero( "division by zero in " + t.to_string() );
        return eval( t.args()[ 0 ], a ) / d;
    }
    }
    throw error( "bad term" );
}

inline bool eval( const formula& f, const assignment& a )
{
    switch ( f.tag() ) {
    case formula::kind::truth:
        return true;
    case formula::kind::falsity:
        return false;
    case formula::kind::bvar: {
        auto it = a.find( f.name() );
        if ( it == a.end() || !std::holds_alternative< bool >( it->second ) )
            throw error( "no Boolean value for " + f.name() );
        return std::get< bool >( it->second );
    }
    case formula::kind::negation:
        return !eval( f.args()[ 0 ], a );
    case formula::kind::conj:
        for ( const auto& x : f.args() )
            if ( !eval( x, a ) )
                return false;
        return true;
    case formula::kind::disj:
        for ( const auto& x : f.args() )
            if ( eval( x, a ) )
                return true;
        return false;
    case formula::kind::implies:
        return !eval( f.args()[ 0 ], a ) || eval( f.args()[ 1 ], a );
    case formula::kind::iff:
        return eval( f.args()[ 0 ], a ) == eval( f.args()[ 1 ], a );
    case formula::kind::cmp:
        return holds( f.op(), eval( f.lhs(), a ), eval( f.rhs(), a ) );
    }
    throw error( "bad formula" );
}

// Domain membership of every variable. Counters must be integers under the
// integer reading and satisfy x < 1 => x = 0 under the relaxed one.
inline bool within_domains( const csp& c, const assignment& a, counter_semantics mode = counter_semantics::integer )
{
    for ( const auto& v : c.vars() ) {
        auto it = a.find( v.name );
        if ( it == a.end() )
            return false;
        if ( v.sort == var_sort::boolean ) {
            if ( !std::holds_alternative< bool >( it->second ) )
                return false;
            continue;
        }
        if ( !std::holds_alternative< rational >( it->second ) )
            return false;
        const rational& x = std::get< rational >( it->second );
        if ( x < v.lo || x > v.hi )
            return false;
        if ( v.sort == var_sort::counter ) {
            if ( mode == counter_semantics::integer && x.get_den() != 1 )
                return false;
            if ( mode == counter_semantics::relaxed && x < 1 && x != 0 )
                return false;
        }
    }
    return true;
}

inline bool satisfies( const csp& c, const assignment& a, counter_semantics mode = counter_semantics::integer )
{
    if ( !within_domains( c, a, mode ) )
        return false;
    for ( const auto& k : c.constraints() )
        if ( !eval( k.body, a ) )
            return false;
    return true;
}

} // namespace pimc

hastype z nat.
forall n:tm. hastype n nat => hastype (s n) nat.
hastype nil list.
forall n:tm. hastype n nat => forall l:tm. hastype l list => hastype (cons n l) list.
forall l:tm. top => hastype (appNil l) (append nil l l).
forall x:tm. top => forall l:tm. top => forall k:tm. top =>
  forall m:tm. top => forall a:tm. hastype a (append l k m) =>
  hastype (appCons x l k m a) (append (cons x l) k (cons x m)).
